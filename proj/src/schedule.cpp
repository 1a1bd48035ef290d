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


#include "gridauth/schedule.h"

#include <array>
#include <chrono>

#include "gridauth/error.h"

namespace gridauth {
namespace {

constexpr Timestamp kSecondsPerDay = 86400;
constexpr std::array<std::string_view, 7> kDayNames{"mon", "tue", "wed", "thu",
                                                     "fri", "sat", "sun"};

Timestamp floor_div(Timestamp a, Timestamp b) {
  Timestamp q = a / b;
  return (a % b != 0 && (a < 0) != (b < 0)) ? q - 1 : q;
}

Weekday parse_day(std::string_view name) {
  for (std::size_t i = 0; i < kDayNames.size(); ++i) {
    if (kDayNames[i] == name) return static_cast<Weekday>(i);
  }
  throw Error(ErrorCode::kParseError, "unknown weekday '" + std::string(name) + "'");
}

}  // namespace

Weekday weekday_of(Timestamp t) {
  using namespace std::chrono;
  sys_days day{days{floor_div(t, kSecondsPerDay)}};
  // iso_encoding: Monday == 1 ... Sunday == 7.
  return static_cast<Weekday>(weekday{day}.iso_encoding() - 1);
}

int minute_of_day(Timestamp t) {
  return static_cast<int>((t - floor_div(t, kSecondsPerDay) * kSecondsPerDay) / 60);
}

TimeSchedule TimeSchedule::always() { return TimeSchedule{}; }

TimeSchedule TimeSchedule::window(Timestamp start, Timestamp end) {
  if (!(start < end)) throw Error(ErrorCode::kInvalidArgument, "window requires start < end");
  TimeSchedule s;
  s.kind_ = Kind::kWindow;
  s.start_ = start;
  s.end_ = end;
  return s;
}

TimeSchedule TimeSchedule::weekly(std::vector<Weekday> days, int start_minute, int end_minute) {
  if (start_minute < 0 || end_minute > 1440 || !(start_minute < end_minute)) {
    throw Error(ErrorCode::kInvalidArgument,
                "weekly schedule requires 0 <= start_minute < end_minute <= 1440");
  }
  if (days.empty()) throw Error(ErrorCode::kInvalidArgument, "weekly schedule needs at least one day");
  TimeSchedule s;
  s.kind_ = Kind::kWeekly;
  for (Weekday d : days) s.day_mask_ |= static_cast<std::uint8_t>(1u << static_cast<unsigned>(d));
  s.start_minute_ = start_minute;
  s.end_minute_ = end_minute;
  return s;
}

TimeSchedule TimeSchedule::union_of(std::vector<TimeSchedule> members) {
  if (members.empty()) throw Error(ErrorCode::kInvalidArgument, "union schedule must be non-empty");
  TimeSchedule s;
  s.kind_ = Kind::kUnion;
  s.members_ = std::move(members);
  return s;
}

std::vector<Weekday> TimeSchedule::working_days() {
  return {Weekday::kMon, Weekday::kTue, Weekday::kWed, Weekday::kThu, Weekday::kFri};
}

bool TimeSchedule::active(Timestamp t) const {
  switch (kind_) {
    case Kind::kAlways:
      return true;
    case Kind::kWindow:
      return start_ <= t && t < end_;
    case Kind::kWeekly: {
      auto day = static_cast<unsigned>(weekday_of(t));
      if ((day_mask_ & (1u << day)) == 0) return false;
      int minute = minute_of_day(t);
      return start_minute_ <= minute && minute < end_minute_;
    }
    case Kind::kUnion:
      for (const auto& m : members_) {
        if (m.active(t)) return true;
      }
      return false;
  }
  return false;
}

Document TimeSchedule::to_document() const {
  switch (kind_) {
    case Kind::kAlways:
      return Document{{"kind", "always"}};
    case Kind::kWindow:
      return Document{{"kind", "window"}, {"start", start_}, {"end", end_}};
    case Kind::kWeekly: {
      Document days = Document::array();
      for (unsigned d = 0; d < 7; ++d) {
        if (day_mask_ & (1u << d)) days.push_back(std::string(kDayNames[d]));
      }
      return Document{{"kind", "weekly"},
                      {"days", std::move(days)},
                      {"start_minute", start_minute_},
                      {"end_minute", end_minute_}};
    }
    case Kind::kUnion: {
      Document members = Document::array();
      for (const auto& m : members_) members.push_back(m.to_document());
      return Document{{"kind", "union"}, {"members", std::move(members)}};
    }
  }
  return Document{};
}

TimeSchedule TimeSchedule::from_document(const Document& doc) {
  std::string kind = get_string(doc, "kind");
  try {
    if (kind == "always") return always();
    if (kind == "window") return window(get_int(doc, "start"), get_int(doc, "end"));
    if (kind == "weekly") {
      std::vector<Weekday> days;
      for (const auto& d : get_array(doc, "days")) {
        if (!d.is_string()) throw Error(ErrorCode::kParseError, "weekday must be a string");
        days.push_back(parse_day(d.get<std::string>()));
      }
      return weekly(std::move(days), static_cast<int>(get_int(doc, "start_minute")),
                    static_cast<int>(get_int(doc, "end_minute")));
    }
    if (kind == "union") {
      std::vector<TimeSchedule> members;
      for (const auto& m : get_array(doc, "members")) members.push_back(from_document(m));
      return union_of(std::move(members));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidArgument) throw Error(ErrorCode::kParseError, e.what());
    throw;
  }
  throw Error(ErrorCode::kParseError, "unknown schedule kind '" + kind + "'");
}

}  // namespace gridauth
