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


#include "gridauth/admin.h"

#include <algorithm>
#include <chrono>
#include <cstdlib>

#include "gridauth/error.h"

namespace gridauth {
namespace {

std::string group_path(const VoRegistry& r, GroupId id) { return r.group_fqan(id).render(); }

std::vector<std::string> sorted_rendered(const std::vector<SubjectName>& subjects) {
  std::vector<std::string> out;
  for (const auto& s : subjects) out.push_back(s.render());
  std::sort(out.begin(), out.end());
  return out;
}

Document request_document(const VoRegistry& r, const MembershipRequest& req) {
  Document groups = Document::array();
  for (GroupId g : req.requested_scopes) groups.push_back(group_path(r, g));
  Document doc{{"id", req.id},
               {"candidate", req.candidate.render()},
               {"groups", std::move(groups)},
               {"state", request_state_name(req.state)},
               {"created_at", req.created_at}};
  if (req.decided_by) doc["decided_by"] = req.decided_by->render();
  if (req.decided_at) doc["decided_at"] = *req.decided_at;
  return doc;
}

void require_root_admin(const VoRegistry& r, const SubjectName& actor) {
  if (!r.authorize_admin(actor, r.root())) {
    throw Error(ErrorCode::kNotAuthorized, actor.render() + " does not administer " + r.vo());
  }
}

Grant grant_from_params(const VoRegistry& r, const Document& p, GrantKind kind) {
  Grant g;
  g.user = SubjectName::parse(get_string(p, "user"));
  g.scope = r.require_group(get_string(p, "group"));
  g.kind = kind;
  if (p.contains("name")) g.name = get_string(p, "name");
  if (p.contains("schedule")) g.schedule = TimeSchedule::from_document(p.at("schedule"));
  return g;
}

// Read-only endpoints.
Document dispatch_read(const VoRegistry& r, const SubjectName& actor, const std::string& path,
                       const Document& p, Timestamp now) {
  if (path == "/core/whoami") {
    Document fqans = Document::array();
    for (const auto& f : r.effective_attributes(actor, now)) fqans.push_back(f.render());
    return Document{{"subject", actor.render()},
                    {"vo", r.vo()},
                    {"fqans", std::move(fqans)},
                    {"admin", r.authorize_admin(actor, r.root())}};
  }
  if (path == "/admin/list-users") {
    GroupId scope = p.contains("group") ? r.require_group(get_string(p, "group")) : r.root();
    if (!r.authorize_admin(actor, scope)) {
      throw Error(ErrorCode::kNotAuthorized, actor.render() + " does not administer " +
                                                 group_path(r, scope));
    }
    return Document{{"users", sorted_rendered(r.holders_of(r.group_fqan(scope), now))}};
  }
  if (path == "/history") {
    require_root_admin(r, actor);
    std::uint64_t since = p.contains("since") ? get_uint(p, "since") : 0;
    Document records = Document::array();
    for (const auto& rec : r.audit_log().since(since)) records.push_back(rec.to_document());
    return Document{{"records", std::move(records)},
                    {"verified", verify_audit_chain(r.audit_log())},
                    {"head", to_hex(r.audit_log().head_hash())},
                    {"size", r.audit_log().size()}};
  }
  if (path == "/request/list") {
    Document list = Document::array();
    for (const auto& [id, req] : r.requests()) {
      bool visible = req.candidate == actor ||
                     std::all_of(req.requested_scopes.begin(), req.requested_scopes.end(),
                                 [&](GroupId g) { return r.authorize_admin(actor, g); });
      if (visible) list.push_back(request_document(r, req));
    }
    return Document{{"requests", std::move(list)}};
  }
  if (path == "/compat/userlist") {
    Fqan fqan = Fqan::parse(get_string(p, "fqan"));
    if (fqan.vo() != r.vo()) {
      throw Error(ErrorCode::kUnknownScope, fqan.render() + " is not in VO " + r.vo());
    }
    return Document{{"users", sorted_rendered(r.holders_of(fqan, now))}};
  }
  throw Error(ErrorCode::kMalformedRequest, "unknown endpoint " + path);
}

// Mutating endpoints; run on a registry copy inside VoStore::write.
Document dispatch_write(VoRegistry& r, const SubjectName& actor, const std::string& path,
                        const Document& p, Timestamp now) {
  if (path == "/admin/create-group") {
    GroupId parent = p.contains("parent") ? r.require_group(get_string(p, "parent")) : r.root();
    bool forced = p.contains("forced") && get_bool(p, "forced");
    GroupId id = r.create_group(actor, {parent}, get_string(p, "name"), forced, now);
    return Document{{"group", group_path(r, id)}};
  }
  if (path == "/admin/link-group") {
    r.add_parent(actor, r.require_group(get_string(p, "group")),
                 r.require_group(get_string(p, "parent")), now);
    return Document::object();
  }
  if (path == "/admin/add-user") {
    return Document{{"grant_id", r.grant(actor, grant_from_params(r, p, GrantKind::kMembership), now)}};
  }
  if (path == "/admin/grant") {
    GrantKind kind = grant_kind_from_name(get_string(p, "kind"));
    return Document{{"grant_id", r.grant(actor, grant_from_params(r, p, kind), now)}};
  }
  if (path == "/admin/revoke-grant") {
    r.revoke_grant(actor, get_uint(p, "grant_id"), now);
    return Document::object();
  }
  if (path == "/admin/delegate") {
    r.delegate(actor, SubjectName::parse(get_string(p, "admin")),
               r.require_group(get_string(p, "group")), now);
    return Document::object();
  }
  if (path == "/request/submit") {
    std::vector<GroupId> scopes;
    for (const auto& g : get_array(p, "groups")) scopes.push_back(r.require_group(g.get<std::string>()));
    return Document{{"request_id", r.submit_request(actor, scopes, now)}};
  }
  if (path == "/request/decide") {
    const MembershipRequest& req =
        r.decide_request(actor, get_uint(p, "request_id"), get_bool(p, "approve"), now);
    return request_document(r, req);
  }
  throw Error(ErrorCode::kMalformedRequest, "unknown endpoint " + path);
}

bool is_write(const std::string& path) {
  return path.rfind("/admin/", 0) == 0 ? path != "/admin/list-users"
                                       : path == "/request/submit" || path == "/request/decide";
}

}  // namespace

Document AdminEnvelope::unsigned_document() const {
  return Document{{"type", "admin-request"},
                  {"chain", chain.to_document()},
                  {"path", path},
                  {"params", params},
                  {"nonce", to_hex(nonce)},
                  {"timestamp", timestamp}};
}

Document AdminEnvelope::to_document() const {
  Document doc = unsigned_document();
  doc["signature"] = to_hex(signature);
  return doc;
}

AdminEnvelope AdminEnvelope::from_document(const Document& doc) {
  if (get_string(doc, "type") != "admin-request" || doc.size() != 7) {
    throw Error(ErrorCode::kParseError, "not an admin request");
  }
  AdminEnvelope e;
  e.chain = CredentialChain::from_document(get_array(doc, "chain"));
  e.path = get_string(doc, "path");
  e.params = get_object(doc, "params");
  e.nonce = get_hex(doc, "nonce");
  e.timestamp = get_int(doc, "timestamp");
  e.signature = get_hex(doc, "signature");
  return e;
}

AdminEnvelope AdminEnvelope::sign(const CredentialChain& chain, const SecretKey& leaf_key,
                                  std::string path, Document params, Timestamp now) {
  AdminEnvelope e;
  e.chain = chain;
  e.path = std::move(path);
  e.params = std::move(params);
  e.nonce = random_bytes(AttributeRequest::kNonceSize);
  e.timestamp = now;
  e.signature = leaf_key.sign(canonical_serialize(e.unsigned_document()));
  return e;
}

const std::vector<std::string>& admin_paths() {
  static const std::vector<std::string> paths = {
      "/core/whoami",       "/admin/create-group", "/admin/link-group", "/admin/add-user",
      "/admin/grant",       "/admin/revoke-grant", "/admin/delegate",   "/admin/list-users",
      "/history",           "/request/submit",     "/request/list",     "/request/decide",
      "/compat/userlist"};
  return paths;
}

AdminService::AdminService(VoStore& store, TrustStore anchors,
                           std::vector<RevocationList> revocation_lists, Timestamp clock_skew)
    : store_(store),
      anchors_(std::move(anchors)),
      revocation_lists_(std::move(revocation_lists)),
      clock_skew_(clock_skew) {}

Document AdminService::dispatch(const SubjectName& actor, const std::string& path,
                                const Document& params, Timestamp now) {
  if (std::find(admin_paths().begin(), admin_paths().end(), path) == admin_paths().end()) {
    throw Error(ErrorCode::kMalformedRequest, "unknown endpoint " + path);
  }
  if (!params.is_object()) throw Error(ErrorCode::kMalformedRequest, "params must be an object");
  try {
    if (is_write(path)) {
      return store_.write(
          [&](VoRegistry& r) { return dispatch_write(r, actor, path, params, now); });
    }
    return store_.read(
        [&](const VoRegistry& r) { return dispatch_read(r, actor, path, params, now); });
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kParseError) throw;
    throw Error(ErrorCode::kMalformedRequest, path + ": " + e.what());
  }
}

Document AdminService::handle(const AdminEnvelope& envelope, Timestamp now) {
  ValidationReport report = validate_chain(envelope.chain, anchors_, revocation_lists_, now);
  if (!report.accepted) {
    throw Error(ErrorCode::kAuthenticationFailed,
                "caller chain rejected: " + std::string(validation_rule_name(report.rule)) +
                    ": " + report.detail);
  }
  if (!envelope.chain.leaf_public_key().verify(canonical_serialize(envelope.unsigned_document()),
                                               envelope.signature)) {
    throw Error(ErrorCode::kAuthenticationFailed, "envelope signature does not verify");
  }
  if (std::llabs(envelope.timestamp - now) > clock_skew_) {
    throw Error(ErrorCode::kAuthenticationFailed, "envelope timestamp outside the allowed skew");
  }
  if (envelope.nonce.size() != AttributeRequest::kNonceSize) {
    throw Error(ErrorCode::kMalformedRequest, "nonce must be 16 bytes");
  }
  if (!nonces_.check_and_insert(envelope.nonce, envelope.timestamp, now, clock_skew_)) {
    throw Error(ErrorCode::kReplayDetected, "envelope nonce already used");
  }
  return dispatch(envelope.chain.end_entity().subject, envelope.path, envelope.params, now);
}

HttpResponse AdminService::handle_http(const std::string& path, const std::string& body,
                                       Timestamp now) {
  try {
    AdminEnvelope envelope;
    try {
      envelope = AdminEnvelope::from_document(canonical_parse(body));
    } catch (const Error& e) {
      throw Error(ErrorCode::kMalformedRequest, e.what());
    }
    if (envelope.path != path) {
      throw Error(ErrorCode::kMalformedRequest, "envelope is addressed to " + envelope.path);
    }
    return HttpResponse{200, canonical_serialize(handle(envelope, now))};
  } catch (const Error& e) {
    return error_response(e);
  }
}

void AdminService::install(HttpServer& server) {
  for (const auto& path : admin_paths()) {
    server.route(path, [this, path](const std::string& body) {
      return handle_http(path, body, wall_clock_now());
    });
  }
}

void AdminService::install(LoopbackNetwork& network, const std::string& endpoint,
                           std::function<Timestamp()> clock) {
  for (const auto& path : admin_paths()) {
    network.serve(endpoint, path, [this, path, clock](const std::string& body) {
      return handle_http(path, body, clock());
    });
  }
}

AdminClient::AdminClient(std::string endpoint, CredentialChain chain, SecretKey key,
                         Transport transport)
    : endpoint_(std::move(endpoint)),
      chain_(std::move(chain)),
      key_(std::move(key)),
      transport_(std::move(transport)) {}

Document AdminClient::call(const std::string& path, Document params, Timestamp now) const {
  AdminEnvelope e = AdminEnvelope::sign(chain_, key_, path, std::move(params), now);
  HttpResponse res = transport_(endpoint_, path, canonical_serialize(e.to_document()));
  if (res.status != 200) throw_error_response(res, endpoint_);
  try {
    return canonical_parse(res.body);
  } catch (const Error& err) {
    throw Error(ErrorCode::kTransportError, endpoint_ + ": malformed response: " + err.what(),
                {endpoint_});
  }
}

std::vector<SubjectName> AdminClient::userlist(const Fqan& fqan, Timestamp now) const {
  Document res = call("/compat/userlist", Document{{"fqan", fqan.render()}}, now);
  std::vector<SubjectName> out;
  for (const auto& s : get_array(res, "users")) out.push_back(SubjectName::parse(s.get<std::string>()));
  return out;
}

Timestamp wall_clock_now() {
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace gridauth
