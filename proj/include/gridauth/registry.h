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

// The membership database of one virtual organization: a DAG of groups,
// time-scheduled grants, delegated administration, membership requests and
// the audit log every mutation goes through.
//
// Every mutation is validated first, then appended to the audit log, then
// applied by replaying that same record. Rebuilding a registry from its log
// therefore runs exactly the code path the live mutation ran.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gridauth/audit.h"
#include "gridauth/credential.h"
#include "gridauth/fqan.h"
#include "gridauth/schedule.h"
#include "gridauth/subject.h"

namespace gridauth {

struct GroupId {
  std::uint64_t value = 0;
  friend auto operator<=>(const GroupId&, const GroupId&) = default;
};

struct GroupNode {
  GroupId id;
  std::string name;
  /// Empty only for the VO root. The first parent is the primary one and
  /// determines the group's rendered FQAN.
  std::vector<GroupId> parents;
  bool forced = false;
};

enum class GrantKind { kMembership, kRole, kCapability };

struct Grant {
  std::uint64_t id = 0;
  SubjectName user;
  GroupId scope;
  GrantKind kind = GrantKind::kMembership;
  /// Role name or capability text; empty for memberships.
  std::string name;
  TimeSchedule schedule;

  Document to_document() const;
  static Grant from_document(const Document& doc);
};

struct AdminDelegation {
  SubjectName admin;
  GroupId scope;
  friend bool operator==(const AdminDelegation&, const AdminDelegation&) = default;
};

enum class RequestState { kPending, kApproved, kRejected };
std::string_view request_state_name(RequestState state);

struct MembershipRequest {
  std::uint64_t id = 0;
  SubjectName candidate;
  std::vector<GroupId> requested_scopes;
  RequestState state = RequestState::kPending;
  std::optional<SubjectName> decided_by;
  Timestamp created_at = 0;
  std::optional<Timestamp> decided_at;

  Document to_document() const;
};

class VoRegistry {
 public:
  /// New VO whose root group is named after the VO; `owner` may administer
  /// every group.
  static VoRegistry create(const std::string& vo, const SubjectName& owner, Timestamp now);
  /// Rebuilds a registry from its audit log. Throws kParseError when the
  /// chain does not verify or a record cannot be applied.
  static VoRegistry replay(const AuditLog& log);

  const std::string& vo() const { return vo_; }
  const SubjectName& owner() const { return owner_; }
  GroupId root() const { return GroupId{0}; }

  // --- groups -------------------------------------------------------------
  const GroupNode& group(GroupId id) const;
  bool has_group(GroupId id) const { return groups_.count(id) != 0; }
  const std::map<GroupId, GroupNode>& groups() const { return groups_; }
  /// Group addressed by its rendered path, e.g. "/datagrid/wp6".
  std::optional<GroupId> find_group(std::string_view path) const;
  GroupId require_group(std::string_view path) const;
  /// FQAN of the group along its primary-parent path.
  Fqan group_fqan(GroupId id) const;
  /// Reflexive ancestor closure over all parent edges.
  std::set<GroupId> ancestors(GroupId id) const;
  /// Reflexive descendant closure.
  std::set<GroupId> descendants(GroupId id) const;

  // --- mutations ------------------------------------------------------------
  // Each throws kNotAuthorized unless authorize_admin(actor, scope) holds for
  // every affected scope, and appends exactly one audit record on success.

  /// Errors: kNotAuthorized, kUnknownScope, kCycleWouldForm, kDuplicateName.
  GroupId create_group(const SubjectName& actor, const std::vector<GroupId>& parents,
                       const std::string& name, bool forced, Timestamp now);
  /// Adds one more parent edge to an existing group.
  /// Errors: kNotAuthorized, kUnknownScope, kCycleWouldForm, kDuplicateName.
  void add_parent(const SubjectName& actor, GroupId group, GroupId parent, Timestamp now);
  /// Stores the grant (its id field is ignored) and returns the new id.
  /// Errors: kNotAuthorized, kUnknownScope, kInvalidArgument.
  std::uint64_t grant(const SubjectName& actor, const Grant& grant, Timestamp now);
  /// Errors: kNotAuthorized, kUnknownEntity.
  void revoke_grant(const SubjectName& actor, std::uint64_t grant_id, Timestamp now);
  /// Errors: kNotAuthorized, kUnknownScope.
  void delegate(const SubjectName& actor, const SubjectName& admin, GroupId scope, Timestamp now);
  /// Any authenticated subject may ask to join. Errors: kUnknownScope.
  std::uint64_t submit_request(const SubjectName& candidate, const std::vector<GroupId>& scopes,
                               Timestamp now);
  /// Approval creates an Always membership grant for every requested scope.
  /// Errors: kUnknownRequest, kAlreadyDecided, kNotAuthorized.
  const MembershipRequest& decide_request(const SubjectName& actor, std::uint64_t id,
                                          bool approve, Timestamp now);

  // --- queries --------------------------------------------------------------
  /// Groups the user belongs to at `t`: the ancestor closure of every group
  /// with an active membership grant.
  std::set<GroupId> membership_closure(const SubjectName& user, Timestamp t) const;
  /// Membership FQANs of the closure plus active role/capability FQANs whose
  /// scope lies in the closure (roles do not propagate), sorted by rendered
  /// string. Empty for unknown users.
  std::vector<Fqan> effective_attributes(const SubjectName& user, Timestamp t) const;
  /// Membership FQANs of forced groups in the user's closure at `t`.
  std::vector<Fqan> forced_attributes(const SubjectName& user, Timestamp t) const;
  bool authorize_admin(const SubjectName& actor, GroupId scope) const;
  /// Every subject with at least one grant, sorted.
  std::vector<SubjectName> users() const;
  /// Subjects whose effective attributes contain `fqan` at `t`, sorted.
  std::vector<SubjectName> holders_of(const Fqan& fqan, Timestamp t) const;

  const std::map<std::uint64_t, Grant>& grants() const { return grants_; }
  const std::vector<AdminDelegation>& delegations() const { return delegations_; }
  const std::map<std::uint64_t, MembershipRequest>& requests() const { return requests_; }
  const MembershipRequest& request(std::uint64_t id) const;
  const AuditLog& audit_log() const { return audit_; }

  /// Full state, including the audit head it corresponds to.
  Document snapshot() const;

 private:
  VoRegistry() = default;

  void commit(const SubjectName& actor, std::string action, Document payload, Timestamp now);
  void apply(const AuditRecord& record);
  void require_admin(const SubjectName& actor, GroupId scope) const;
  void require_scope(GroupId scope) const;
  bool name_taken_under(GroupId parent, const std::string& name) const;

  std::string vo_;
  SubjectName owner_;
  std::map<GroupId, GroupNode> groups_;
  std::map<std::uint64_t, Grant> grants_;
  std::vector<AdminDelegation> delegations_;
  std::map<std::uint64_t, MembershipRequest> requests_;
  std::uint64_t next_group_ = 0;
  std::uint64_t next_grant_ = 0;
  std::uint64_t next_request_ = 0;
  AuditLog audit_;
};

std::string_view grant_kind_name(GrantKind kind);
GrantKind grant_kind_from_name(std::string_view name);

}  // namespace gridauth
