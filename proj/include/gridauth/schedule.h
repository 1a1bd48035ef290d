// Copyright 2026 The gridauth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <cstdint>
#include <vector>

#include "gridauth/canonical.h"
#include "gridauth/credential.h"

namespace gridauth {

enum class Weekday : std::uint8_t { kMon = 0, kTue, kWed, kThu, kFri, kSat, kSun };

/// Civil UTC day of week and minute of day for an epoch timestamp.
Weekday weekday_of(Timestamp t);
int minute_of_day(Timestamp t);

/// When a grant (or a site window) is in force. All intervals are half-open.
class TimeSchedule {
 public:
  enum class Kind { kAlways, kWindow, kWeekly, kUnion };

  static TimeSchedule always();
  /// Active for start <= t < end.
  static TimeSchedule window(Timestamp start, Timestamp end);
  /// Active on the given UTC days for start_minute <= minute-of-day < end_minute.
  static TimeSchedule weekly(std::vector<Weekday> days, int start_minute, int end_minute);
  static TimeSchedule union_of(std::vector<TimeSchedule> members);

  /// Monday to Friday.
  static std::vector<Weekday> working_days();

  bool active(Timestamp t) const;

  Kind kind() const { return kind_; }
  Timestamp start() const { return start_; }
  Timestamp end() const { return end_; }
  std::uint8_t day_mask() const { return day_mask_; }
  int start_minute() const { return start_minute_; }
  int end_minute() const { return end_minute_; }
  const std::vector<TimeSchedule>& members() const { return members_; }

  Document to_document() const;
  static TimeSchedule from_document(const Document& doc);

  friend bool operator==(const TimeSchedule&, const TimeSchedule&) = default;

 private:
  Kind kind_ = Kind::kAlways;
  Timestamp start_ = 0;
  Timestamp end_ = 0;
  std::uint8_t day_mask_ = 0;
  int start_minute_ = 0;
  int end_minute_ = 0;
  std::vector<TimeSchedule> members_;
};

/// schedule_active(s, t) as a free function.
inline bool schedule_active(const TimeSchedule& s, Timestamp t) { return s.active(t); }

}  // namespace gridauth
