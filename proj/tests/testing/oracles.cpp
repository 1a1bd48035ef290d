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


#include "testing/oracles.h"

#include <algorithm>
#include <ctime>
#include <deque>

namespace gridauth::testing {

int oracle_weekday(Timestamp t) {
  std::time_t tt = static_cast<std::time_t>(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  return (tm.tm_wday + 6) % 7;
}

int oracle_minute_of_day(Timestamp t) {
  std::time_t tt = static_cast<std::time_t>(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  return tm.tm_hour * 60 + tm.tm_min;
}

bool oracle_schedule_active(const TimeSchedule& s, Timestamp t) {
  switch (s.kind()) {
    case TimeSchedule::Kind::kAlways:
      return true;
    case TimeSchedule::Kind::kWindow:
      return s.start() <= t && t < s.end();
    case TimeSchedule::Kind::kWeekly: {
      bool day_ok = (s.day_mask() >> oracle_weekday(t)) & 1u;
      int m = oracle_minute_of_day(t);
      return day_ok && s.start_minute() <= m && m < s.end_minute();
    }
    case TimeSchedule::Kind::kUnion:
      for (const auto& m : s.members()) {
        if (oracle_schedule_active(m, t)) return true;
      }
      return false;
  }
  return false;
}

std::string VoModel::path(std::uint64_t id) const {
  std::vector<std::string> names;
  while (id != 0) {
    const GroupModel& g = groups.at(id);
    names.push_back(g.name);
    id = g.parents.front();
  }
  std::string out = "/" + vo;
  for (auto it = names.rbegin(); it != names.rend(); ++it) out += "/" + *it;
  return out;
}

std::set<std::uint64_t> VoModel::ancestor_closure(const std::set<std::uint64_t>& start) const {
  std::set<std::uint64_t> seen(start.begin(), start.end());
  std::deque<std::uint64_t> queue(start.begin(), start.end());
  while (!queue.empty()) {
    std::uint64_t n = queue.front();
    queue.pop_front();
    for (std::uint64_t p : groups.at(n).parents) {
      if (seen.insert(p).second) queue.push_back(p);
    }
  }
  return seen;
}

std::set<std::uint64_t> VoModel::membership(const SubjectName& user, Timestamp t) const {
  std::set<std::uint64_t> direct;
  for (const auto& g : grants) {
    if (g.user == user && g.kind == GrantKind::kMembership && oracle_schedule_active(g.schedule, t)) {
      direct.insert(g.scope);
    }
  }
  return ancestor_closure(direct);
}

std::set<std::string> VoModel::entitled(const SubjectName& user, Timestamp t) const {
  std::set<std::uint64_t> closure = membership(user, t);
  std::set<std::string> out;
  for (std::uint64_t id : closure) out.insert(path(id));
  for (const auto& g : grants) {
    if (g.user != user || g.kind == GrantKind::kMembership) continue;
    if (!closure.count(g.scope) || !oracle_schedule_active(g.schedule, t)) continue;
    out.insert(path(g.scope) + (g.kind == GrantKind::kRole ? "/Role=" : "/Capability=") + g.name);
  }
  return out;
}

std::set<std::string> VoModel::forced(const SubjectName& user, Timestamp t) const {
  std::set<std::string> out;
  for (std::uint64_t id : membership(user, t)) {
    if (groups.at(id).forced) out.insert(path(id));
  }
  return out;
}

bool VoModel::acyclic() const {
  // Kahn's algorithm over child->parent edges.
  std::map<std::uint64_t, int> indegree;
  for (const auto& [id, g] : groups) indegree[id];
  for (const auto& [id, g] : groups) {
    for (auto p : g.parents) ++indegree[p];
  }
  std::deque<std::uint64_t> ready;
  for (const auto& [id, d] : indegree) {
    if (d == 0) ready.push_back(id);
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    auto n = ready.front();
    ready.pop_front();
    ++visited;
    for (auto p : groups.at(n).parents) {
      if (--indegree[p] == 0) ready.push_back(p);
    }
  }
  return visited == groups.size();
}

VoModel model_of(const VoRegistry& registry) {
  VoModel m;
  m.vo = registry.vo();
  for (const auto& [id, node] : registry.groups()) {
    GroupModel g{node.name, {}, node.forced};
    for (GroupId p : node.parents) g.parents.push_back(p.value);
    m.groups[id.value] = std::move(g);
  }
  for (const auto& [id, grant] : registry.grants()) {
    m.grants.push_back(GrantModel{grant.user, grant.scope.value, grant.kind, grant.name, grant.schedule});
  }
  return m;
}

TimeSchedule random_schedule(std::mt19937_64& rng, Timestamp base, int depth) {
  int kind = static_cast<int>(rng() % (depth == 0 ? 4 : 3));
  switch (kind) {
    case 0:
      return TimeSchedule::always();
    case 1: {
      Timestamp start = base + static_cast<Timestamp>(rng() % (14 * 86400)) - 7 * 86400;
      return TimeSchedule::window(start, start + 1 + static_cast<Timestamp>(rng() % (7 * 86400)));
    }
    case 2: {
      std::vector<Weekday> days;
      for (int d = 0; d < 7; ++d) {
        if (rng() % 2) days.push_back(static_cast<Weekday>(d));
      }
      if (days.empty()) days.push_back(static_cast<Weekday>(rng() % 7));
      int a = static_cast<int>(rng() % 1440);
      int b = static_cast<int>(rng() % 1440);
      if (a == b) b = a + 1;
      return TimeSchedule::weekly(days, std::min(a, b), std::max(a, b));
    }
    default: {
      std::vector<TimeSchedule> members;
      int n = 1 + static_cast<int>(rng() % 3);
      for (int i = 0; i < n; ++i) members.push_back(random_schedule(rng, base, depth + 1));
      return TimeSchedule::union_of(std::move(members));
    }
  }
}

SubjectName random_user_subject(int i) {
  return SubjectName::parse("/O=Grid/CN=user" + std::to_string(i));
}

VoRegistry random_registry(std::mt19937_64& rng, const RandomVoOptions& o, Timestamp now) {
  const SubjectName owner = SubjectName::parse("/O=Grid/CN=owner");
  VoRegistry r = VoRegistry::create("vo" + std::to_string(rng() % 1000), owner, now);
  std::vector<GroupId> ids = {r.root()};
  int groups = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(o.max_groups));
  for (int i = 1; i < groups; ++i) {
    int nparents = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(o.max_parents));
    std::vector<GroupId> parents;
    for (int k = 0; k < nparents; ++k) {
      GroupId p = ids[rng() % ids.size()];
      if (std::find(parents.begin(), parents.end(), p) == parents.end()) parents.push_back(p);
    }
    bool forced = std::uniform_real_distribution<double>(0, 1)(rng) < o.forced_probability;
    ids.push_back(r.create_group(owner, parents, "g" + std::to_string(i), forced, now));
  }
  int grants = static_cast<int>(rng() % static_cast<std::uint64_t>(o.max_grants + 1));
  for (int i = 0; i < grants; ++i) {
    Grant g;
    g.user = random_user_subject(static_cast<int>(rng() % static_cast<std::uint64_t>(o.users)));
    g.scope = ids[rng() % ids.size()];
    int kind = static_cast<int>(rng() % 4);
    g.kind = kind <= 1 ? GrantKind::kMembership : kind == 2 ? GrantKind::kRole : GrantKind::kCapability;
    if (g.kind == GrantKind::kRole) g.name = rng() % 2 ? "admin" : "production";
    if (g.kind == GrantKind::kCapability) g.name = "cap-" + std::to_string(rng() % 5);
    g.schedule = random_schedule(rng, now);
    r.grant(owner, g, now);
  }
  return r;
}

}  // namespace gridauth::testing
