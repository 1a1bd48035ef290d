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


#include "gridauth/registry.h"

#include <algorithm>
#include <deque>

#include "gridauth/error.h"

namespace gridauth {
namespace {

Document ids_document(const std::vector<GroupId>& ids) {
  Document arr = Document::array();
  for (GroupId id : ids) arr.push_back(id.value);
  return arr;
}

std::vector<GroupId> ids_from_document(const Document& arr) {
  if (!arr.is_array()) throw Error(ErrorCode::kParseError, "expected an id array");
  std::vector<GroupId> out;
  for (const auto& v : arr) {
    if (!v.is_number_unsigned()) throw Error(ErrorCode::kParseError, "group id must be unsigned");
    out.push_back(GroupId{v.get<std::uint64_t>()});
  }
  return out;
}

}  // namespace

std::string_view grant_kind_name(GrantKind kind) {
  switch (kind) {
    case GrantKind::kMembership: return "membership";
    case GrantKind::kRole: return "role";
    case GrantKind::kCapability: return "capability";
  }
  return "membership";
}

GrantKind grant_kind_from_name(std::string_view name) {
  if (name == "membership") return GrantKind::kMembership;
  if (name == "role") return GrantKind::kRole;
  if (name == "capability") return GrantKind::kCapability;
  throw Error(ErrorCode::kParseError, "unknown grant kind '" + std::string(name) + "'");
}

std::string_view request_state_name(RequestState state) {
  switch (state) {
    case RequestState::kPending: return "pending";
    case RequestState::kApproved: return "approved";
    case RequestState::kRejected: return "rejected";
  }
  return "pending";
}

Document Grant::to_document() const {
  return Document{{"id", id},
                  {"user", user.render()},
                  {"scope", scope.value},
                  {"kind", std::string(grant_kind_name(kind))},
                  {"name", name},
                  {"schedule", schedule.to_document()}};
}

Grant Grant::from_document(const Document& doc) {
  Grant g;
  g.id = get_uint(doc, "id");
  g.user = SubjectName::parse(get_string(doc, "user"));
  g.scope = GroupId{get_uint(doc, "scope")};
  g.kind = grant_kind_from_name(get_string(doc, "kind"));
  g.name = get_string(doc, "name");
  g.schedule = TimeSchedule::from_document(get_object(doc, "schedule"));
  return g;
}

Document MembershipRequest::to_document() const {
  Document doc{{"id", id},
               {"candidate", candidate.render()},
               {"scopes", ids_document(requested_scopes)},
               {"state", std::string(request_state_name(state))},
               {"created_at", created_at}};
  if (decided_by) doc["decided_by"] = decided_by->render();
  if (decided_at) doc["decided_at"] = *decided_at;
  return doc;
}

// --- construction -----------------------------------------------------------

VoRegistry VoRegistry::create(const std::string& vo, const SubjectName& owner, Timestamp now) {
  if (!Fqan::is_valid_name(vo)) throw Error(ErrorCode::kInvalidArgument, "invalid VO name");
  VoRegistry reg;
  reg.commit(owner, "create-vo", Document{{"vo", vo}, {"owner", owner.render()}}, now);
  return reg;
}

VoRegistry VoRegistry::replay(const AuditLog& log) {
  if (!verify_audit_chain(log)) throw Error(ErrorCode::kParseError, "audit chain does not verify");
  if (log.empty() || log.records().front().action != "create-vo") {
    throw Error(ErrorCode::kParseError, "audit log does not start with create-vo");
  }
  VoRegistry reg;
  for (const auto& r : log.records()) {
    reg.audit_.append(r.timestamp, r.actor, r.action, r.payload);
    try {
      reg.apply(reg.audit_.records().back());
    } catch (const Error& e) {
      throw Error(ErrorCode::kParseError,
                  "cannot replay record " + std::to_string(r.seq) + ": " + e.what());
    }
  }
  if (reg.audit_.head_hash() != log.head_hash()) {
    throw Error(ErrorCode::kParseError, "replayed audit head differs");
  }
  return reg;
}

void VoRegistry::commit(const SubjectName& actor, std::string action, Document payload,
                        Timestamp now) {
  const AuditRecord& record = audit_.append(now, actor, std::move(action), std::move(payload));
  apply(record);
}

void VoRegistry::apply(const AuditRecord& record) {
  const Document& p = record.payload;
  const std::string& action = record.action;
  if (action == "create-vo") {
    if (!groups_.empty()) throw Error(ErrorCode::kParseError, "VO already created");
    vo_ = get_string(p, "vo");
    owner_ = SubjectName::parse(get_string(p, "owner"));
    groups_[GroupId{0}] = GroupNode{GroupId{0}, vo_, {}, false};
    next_group_ = 1;
  } else if (action == "create-group") {
    GroupNode node;
    node.id = GroupId{get_uint(p, "id")};
    node.name = get_string(p, "name");
    node.parents = ids_from_document(get_array(p, "parents"));
    node.forced = get_bool(p, "forced");
    if (node.id.value != next_group_) throw Error(ErrorCode::kParseError, "group id out of order");
    for (GroupId parent : node.parents) require_scope(parent);
    groups_[node.id] = std::move(node);
    ++next_group_;
  } else if (action == "add-parent") {
    GroupId group{get_uint(p, "group")};
    GroupId parent{get_uint(p, "parent")};
    require_scope(group);
    require_scope(parent);
    groups_[group].parents.push_back(parent);
  } else if (action == "grant") {
    Grant g = Grant::from_document(get_object(p, "grant"));
    if (g.id != next_grant_) throw Error(ErrorCode::kParseError, "grant id out of order");
    require_scope(g.scope);
    grants_[g.id] = std::move(g);
    ++next_grant_;
  } else if (action == "revoke-grant") {
    if (grants_.erase(get_uint(p, "id")) == 0) {
      throw Error(ErrorCode::kParseError, "revoking an unknown grant");
    }
  } else if (action == "delegate") {
    AdminDelegation d{SubjectName::parse(get_string(p, "admin")), GroupId{get_uint(p, "scope")}};
    require_scope(d.scope);
    delegations_.push_back(std::move(d));
  } else if (action == "submit-request") {
    MembershipRequest req;
    req.id = get_uint(p, "id");
    req.candidate = SubjectName::parse(get_string(p, "candidate"));
    req.requested_scopes = ids_from_document(get_array(p, "scopes"));
    req.created_at = record.timestamp;
    if (req.id != next_request_) throw Error(ErrorCode::kParseError, "request id out of order");
    requests_[req.id] = std::move(req);
    ++next_request_;
  } else if (action == "decide-request") {
    auto it = requests_.find(get_uint(p, "id"));
    if (it == requests_.end()) throw Error(ErrorCode::kParseError, "deciding an unknown request");
    MembershipRequest& req = it->second;
    if (req.state != RequestState::kPending) throw Error(ErrorCode::kParseError, "request decided");
    bool approve = get_bool(p, "approve");
    req.state = approve ? RequestState::kApproved : RequestState::kRejected;
    req.decided_by = record.actor;
    req.decided_at = record.timestamp;
    const Document& grant_ids = get_array(p, "grant_ids");
    if (approve) {
      if (grant_ids.size() != req.requested_scopes.size()) {
        throw Error(ErrorCode::kParseError, "grant ids do not match requested scopes");
      }
      for (std::size_t i = 0; i < req.requested_scopes.size(); ++i) {
        Grant g;
        g.id = grant_ids[i].get<std::uint64_t>();
        if (g.id != next_grant_) throw Error(ErrorCode::kParseError, "grant id out of order");
        g.user = req.candidate;
        g.scope = req.requested_scopes[i];
        g.kind = GrantKind::kMembership;
        g.schedule = TimeSchedule::always();
        grants_[g.id] = std::move(g);
        ++next_grant_;
      }
    } else if (!grant_ids.empty()) {
      throw Error(ErrorCode::kParseError, "rejected request with grants");
    }
  } else {
    throw Error(ErrorCode::kParseError, "unknown audit action '" + action + "'");
  }
}

// --- groups -----------------------------------------------------------------

const GroupNode& VoRegistry::group(GroupId id) const {
  auto it = groups_.find(id);
  if (it == groups_.end()) {
    throw Error(ErrorCode::kUnknownScope, "unknown group id " + std::to_string(id.value));
  }
  return it->second;
}

void VoRegistry::require_scope(GroupId scope) const { (void)group(scope); }

std::optional<GroupId> VoRegistry::find_group(std::string_view path) const {
  Fqan fqan;
  try {
    fqan = Fqan::parse(path);
  } catch (const Error&) {
    return std::nullopt;
  }
  if (!fqan.is_membership() || fqan.vo() != vo_) return std::nullopt;
  GroupId current = root();
  for (const auto& segment : fqan.groups()) {
    std::optional<GroupId> next;
    for (const auto& [id, node] : groups_) {
      if (!node.parents.empty() && node.parents.front() == current && node.name == segment) {
        next = id;
        break;
      }
    }
    if (!next) return std::nullopt;
    current = *next;
  }
  return current;
}

GroupId VoRegistry::require_group(std::string_view path) const {
  auto id = find_group(path);
  if (!id) throw Error(ErrorCode::kUnknownScope, "unknown group " + std::string(path));
  return *id;
}

Fqan VoRegistry::group_fqan(GroupId id) const {
  std::vector<std::string> names;
  GroupId current = id;
  while (true) {
    const GroupNode& node = group(current);
    if (node.parents.empty()) break;
    names.push_back(node.name);
    current = node.parents.front();
  }
  std::reverse(names.begin(), names.end());
  return Fqan(vo_, std::move(names));
}

std::set<GroupId> VoRegistry::ancestors(GroupId id) const {
  std::set<GroupId> seen{id};
  std::deque<GroupId> queue{id};
  while (!queue.empty()) {
    GroupId g = queue.front();
    queue.pop_front();
    for (GroupId parent : group(g).parents) {
      if (seen.insert(parent).second) queue.push_back(parent);
    }
  }
  return seen;
}

std::set<GroupId> VoRegistry::descendants(GroupId id) const {
  std::map<GroupId, std::vector<GroupId>> children;
  for (const auto& [gid, node] : groups_) {
    for (GroupId parent : node.parents) children[parent].push_back(gid);
  }
  std::set<GroupId> seen{id};
  std::deque<GroupId> queue{id};
  while (!queue.empty()) {
    GroupId g = queue.front();
    queue.pop_front();
    for (GroupId child : children[g]) {
      if (seen.insert(child).second) queue.push_back(child);
    }
  }
  return seen;
}

bool VoRegistry::name_taken_under(GroupId parent, const std::string& name) const {
  return std::any_of(groups_.begin(), groups_.end(), [&](const auto& entry) {
    const GroupNode& node = entry.second;
    return node.name == name &&
           std::find(node.parents.begin(), node.parents.end(), parent) != node.parents.end();
  });
}

// --- mutations --------------------------------------------------------------

void VoRegistry::require_admin(const SubjectName& actor, GroupId scope) const {
  if (!authorize_admin(actor, scope)) {
    throw Error(ErrorCode::kNotAuthorized,
                actor.render() + " may not administer " + group_fqan(scope).render());
  }
}

GroupId VoRegistry::create_group(const SubjectName& actor, const std::vector<GroupId>& parents,
                                 const std::string& name, bool forced, Timestamp now) {
  if (parents.empty()) throw Error(ErrorCode::kInvalidArgument, "a group needs at least one parent");
  if (!Fqan::is_valid_name(name)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid group name '" + name + "'");
  }
  std::set<GroupId> unique(parents.begin(), parents.end());
  if (unique.size() != parents.size()) {
    throw Error(ErrorCode::kInvalidArgument, "duplicate parent in group creation");
  }
  // A fresh node has no descendants, so only a parent naming the new id
  // itself could close a cycle.
  GroupId id{next_group_};
  if (unique.count(id) != 0) throw Error(ErrorCode::kCycleWouldForm, "group cannot parent itself");
  for (GroupId parent : parents) require_scope(parent);
  for (GroupId parent : parents) require_admin(actor, parent);
  for (GroupId parent : parents) {
    if (name_taken_under(parent, name)) {
      throw Error(ErrorCode::kDuplicateName,
                  "'" + name + "' already exists under " + group_fqan(parent).render());
    }
  }
  commit(actor, "create-group",
         Document{{"id", id.value}, {"name", name}, {"parents", ids_document(parents)},
                  {"forced", forced}},
         now);
  return id;
}

void VoRegistry::add_parent(const SubjectName& actor, GroupId group_id, GroupId parent,
                            Timestamp now) {
  require_scope(group_id);
  require_scope(parent);
  if (group_id == root()) throw Error(ErrorCode::kInvalidArgument, "the VO root has no parents");
  require_admin(actor, group_id);
  require_admin(actor, parent);
  if (descendants(group_id).count(parent) != 0) {
    throw Error(ErrorCode::kCycleWouldForm, group_fqan(parent).render() + " descends from " +
                                                group_fqan(group_id).render());
  }
  const GroupNode& node = group(group_id);
  if (std::find(node.parents.begin(), node.parents.end(), parent) != node.parents.end()) {
    throw Error(ErrorCode::kInvalidArgument, "edge already present");
  }
  if (name_taken_under(parent, node.name)) {
    throw Error(ErrorCode::kDuplicateName,
                "'" + node.name + "' already exists under " + group_fqan(parent).render());
  }
  commit(actor, "add-parent", Document{{"group", group_id.value}, {"parent", parent.value}}, now);
}

std::uint64_t VoRegistry::grant(const SubjectName& actor, const Grant& g, Timestamp now) {
  require_scope(g.scope);
  require_admin(actor, g.scope);
  switch (g.kind) {
    case GrantKind::kMembership:
      if (!g.name.empty()) throw Error(ErrorCode::kInvalidArgument, "membership grants carry no name");
      break;
    case GrantKind::kRole:
      if (!Fqan::is_valid_name(g.name)) {
        throw Error(ErrorCode::kInvalidArgument, "invalid role name '" + g.name + "'");
      }
      break;
    case GrantKind::kCapability:
      (void)Fqan(vo_, {}, std::nullopt, g.name);  // validates the capability text
      break;
  }
  Grant stored = g;
  stored.id = next_grant_;
  commit(actor, "grant", Document{{"grant", stored.to_document()}}, now);
  return stored.id;
}

void VoRegistry::revoke_grant(const SubjectName& actor, std::uint64_t grant_id, Timestamp now) {
  auto it = grants_.find(grant_id);
  if (it == grants_.end()) {
    throw Error(ErrorCode::kUnknownEntity, "unknown grant " + std::to_string(grant_id));
  }
  require_admin(actor, it->second.scope);
  commit(actor, "revoke-grant", Document{{"id", grant_id}}, now);
}

void VoRegistry::delegate(const SubjectName& actor, const SubjectName& admin, GroupId scope,
                          Timestamp now) {
  require_scope(scope);
  require_admin(actor, scope);
  commit(actor, "delegate", Document{{"admin", admin.render()}, {"scope", scope.value}}, now);
}

std::uint64_t VoRegistry::submit_request(const SubjectName& candidate,
                                         const std::vector<GroupId>& scopes, Timestamp now) {
  if (scopes.empty()) throw Error(ErrorCode::kInvalidArgument, "request names no group");
  for (GroupId s : scopes) require_scope(s);
  std::uint64_t id = next_request_;
  commit(candidate, "submit-request",
         Document{{"id", id}, {"candidate", candidate.render()}, {"scopes", ids_document(scopes)}},
         now);
  return id;
}

const MembershipRequest& VoRegistry::decide_request(const SubjectName& actor, std::uint64_t id,
                                                    bool approve, Timestamp now) {
  auto it = requests_.find(id);
  if (it == requests_.end()) {
    throw Error(ErrorCode::kUnknownRequest, "unknown request " + std::to_string(id));
  }
  if (it->second.state != RequestState::kPending) {
    throw Error(ErrorCode::kAlreadyDecided, "request " + std::to_string(id) + " already decided");
  }
  for (GroupId scope : it->second.requested_scopes) require_admin(actor, scope);
  Document grant_ids = Document::array();
  if (approve) {
    for (std::size_t i = 0; i < it->second.requested_scopes.size(); ++i) {
      grant_ids.push_back(next_grant_ + i);
    }
  }
  commit(actor, "decide-request",
         Document{{"id", id}, {"approve", approve}, {"grant_ids", std::move(grant_ids)}}, now);
  return requests_.at(id);
}

// --- queries ----------------------------------------------------------------

std::set<GroupId> VoRegistry::membership_closure(const SubjectName& user, Timestamp t) const {
  std::set<GroupId> closure;
  for (const auto& [id, g] : grants_) {
    if (g.kind != GrantKind::kMembership || g.user != user || !g.schedule.active(t)) continue;
    if (closure.count(g.scope) != 0) continue;
    auto up = ancestors(g.scope);
    closure.insert(up.begin(), up.end());
  }
  return closure;
}

std::vector<Fqan> VoRegistry::effective_attributes(const SubjectName& user, Timestamp t) const {
  std::set<GroupId> closure = membership_closure(user, t);
  std::map<std::string, Fqan> by_rendered;
  for (GroupId g : closure) {
    Fqan f = group_fqan(g);
    by_rendered.emplace(f.render(), std::move(f));
  }
  for (const auto& [id, g] : grants_) {
    if (g.kind == GrantKind::kMembership || g.user != user || !g.schedule.active(t)) continue;
    if (closure.count(g.scope) == 0) continue;
    Fqan base = group_fqan(g.scope);
    Fqan f = g.kind == GrantKind::kRole ? Fqan(vo_, base.groups(), g.name)
                                        : Fqan(vo_, base.groups(), std::nullopt, g.name);
    by_rendered.emplace(f.render(), std::move(f));
  }
  std::vector<Fqan> out;
  out.reserve(by_rendered.size());
  for (auto& [_, f] : by_rendered) out.push_back(std::move(f));
  return out;
}

std::vector<Fqan> VoRegistry::forced_attributes(const SubjectName& user, Timestamp t) const {
  std::vector<Fqan> out;
  for (GroupId g : membership_closure(user, t)) {
    if (group(g).forced) out.push_back(group_fqan(g));
  }
  std::sort(out.begin(), out.end(),
            [](const Fqan& a, const Fqan& b) { return a.render() < b.render(); });
  return out;
}

bool VoRegistry::authorize_admin(const SubjectName& actor, GroupId scope) const {
  if (actor == owner_) return true;
  if (!has_group(scope)) return false;
  std::set<GroupId> up = ancestors(scope);
  return std::any_of(delegations_.begin(), delegations_.end(), [&](const AdminDelegation& d) {
    return d.admin == actor && up.count(d.scope) != 0;
  });
}

std::vector<SubjectName> VoRegistry::users() const {
  std::set<SubjectName> users;
  for (const auto& [id, g] : grants_) users.insert(g.user);
  return std::vector<SubjectName>(users.begin(), users.end());
}

std::vector<SubjectName> VoRegistry::holders_of(const Fqan& fqan, Timestamp t) const {
  std::vector<SubjectName> out;
  for (const auto& user : users()) {
    auto attrs = effective_attributes(user, t);
    if (std::find(attrs.begin(), attrs.end(), fqan) != attrs.end()) out.push_back(user);
  }
  return out;
}

const MembershipRequest& VoRegistry::request(std::uint64_t id) const {
  auto it = requests_.find(id);
  if (it == requests_.end()) {
    throw Error(ErrorCode::kUnknownRequest, "unknown request " + std::to_string(id));
  }
  return it->second;
}

Document VoRegistry::snapshot() const {
  Document groups = Document::array();
  for (const auto& [id, node] : groups_) {
    groups.push_back(Document{{"id", id.value},
                              {"name", node.name},
                              {"parents", ids_document(node.parents)},
                              {"forced", node.forced},
                              {"fqan", group_fqan(id).render()}});
  }
  Document grants = Document::array();
  for (const auto& [id, g] : grants_) grants.push_back(g.to_document());
  Document delegations = Document::array();
  for (const auto& d : delegations_) {
    delegations.push_back(Document{{"admin", d.admin.render()}, {"scope", d.scope.value}});
  }
  Document requests = Document::array();
  for (const auto& [id, r] : requests_) requests.push_back(r.to_document());
  return Document{{"format", "gridauth-registry/1"},
                  {"vo", vo_},
                  {"owner", owner_.render()},
                  {"groups", std::move(groups)},
                  {"grants", std::move(grants)},
                  {"delegations", std::move(delegations)},
                  {"requests", std::move(requests)},
                  {"audit_head", Document{{"records", static_cast<std::uint64_t>(audit_.size())},
                                          {"hash", to_hex(audit_.head_hash())}}}};
}

}  // namespace gridauth
