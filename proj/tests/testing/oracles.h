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

// Independent reference implementations used to check the library.
//
// None of these call into the code under test beyond reading plain data
// (schedule parameters, graph edges); they recompute answers from scratch
// with deliberately naive algorithms.

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "gridauth/registry.h"
#include "gridauth/schedule.h"

namespace gridauth::testing {

/// Day of week via gmtime_r: 0 = Monday ... 6 = Sunday.
int oracle_weekday(Timestamp t);
/// Minute of the UTC day via gmtime_r.
int oracle_minute_of_day(Timestamp t);
/// Evaluates a schedule from its parameters using the gmtime-based calendar.
bool oracle_schedule_active(const TimeSchedule& s, Timestamp t);

/// A plain copy of a VO: group names, parent edges and grants.
struct GroupModel {
  std::string name;
  std::vector<std::uint64_t> parents;  // first = primary
  bool forced = false;
};

struct GrantModel {
  SubjectName user;
  std::uint64_t scope = 0;
  GrantKind kind = GrantKind::kMembership;
  std::string name;
  TimeSchedule schedule;
};

struct VoModel {
  std::string vo;
  std::map<std::uint64_t, GroupModel> groups;  // id 0 = root
  std::vector<GrantModel> grants;

  /// Path through primary parents, e.g. "/datagrid/wp6".
  std::string path(std::uint64_t id) const;
  /// Breadth-first walk over every parent edge, including the start nodes.
  std::set<std::uint64_t> ancestor_closure(const std::set<std::uint64_t>& start) const;
  /// Groups reached from the user's active membership grants at t.
  std::set<std::uint64_t> membership(const SubjectName& user, Timestamp t) const;
  /// Rendered entitled FQANs: membership closure plus role and capability
  /// FQANs whose scope is in that closure.
  std::set<std::string> entitled(const SubjectName& user, Timestamp t) const;
  /// Rendered membership FQANs of forced groups in the closure.
  std::set<std::string> forced(const SubjectName& user, Timestamp t) const;
  /// True iff following parent edges from any node never revisits it.
  bool acyclic() const;
};

/// Snapshot of a registry into the plain model (reads public accessors only).
VoModel model_of(const VoRegistry& registry);

/// Random schedules: Always, Window, Weekly or a Union of those.
TimeSchedule random_schedule(std::mt19937_64& rng, Timestamp base, int depth = 0);

struct RandomVoOptions {
  int max_groups = 50;
  int max_parents = 3;
  int users = 12;
  int max_grants = 200;
  double forced_probability = 0.1;
};

/// Builds a random DAG registry with random scheduled grants. Returns the
/// registry; user subjects are "/O=Grid/CN=user<i>".
VoRegistry random_registry(std::mt19937_64& rng, const RandomVoOptions& options, Timestamp now);
SubjectName random_user_subject(int i);

}  // namespace gridauth::testing
