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


#include "gridauth/authority.h"

#include <algorithm>
#include <cstdlib>

#include "gridauth/error.h"

namespace gridauth {
namespace {

Document fqan_array(const std::vector<Fqan>& fqans) {
  Document arr = Document::array();
  for (const auto& f : fqans) arr.push_back(f.render());
  return arr;
}

std::vector<Fqan> fqans_from_array(const Document& arr) {
  if (!arr.is_array()) throw Error(ErrorCode::kParseError, "expected an FQAN array");
  std::vector<Fqan> out;
  for (const auto& v : arr) {
    if (!v.is_string()) throw Error(ErrorCode::kParseError, "FQAN must be a string");
    out.push_back(Fqan::parse(v.get<std::string>()));
  }
  return out;
}

void sort_unique(std::vector<Fqan>& fqans) {
  std::sort(fqans.begin(), fqans.end(),
            [](const Fqan& a, const Fqan& b) { return a.render() < b.render(); });
  fqans.erase(std::unique(fqans.begin(), fqans.end()), fqans.end());
}

}  // namespace

// --- documents --------------------------------------------------------------

Document AttributeAssertion::unsigned_document() const {
  return Document{{"type", "attribute-assertion"},
                  {"holder", holder.render()},
                  {"holder_serial", holder_serial},
                  {"issuer", issuer.render()},
                  {"vo", vo},
                  {"fqans", fqan_array(fqans)},
                  {"not_before", validity.not_before},
                  {"not_after", validity.not_after},
                  {"issued_at", issued_at},
                  {"serial", serial}};
}

Document AttributeAssertion::to_document() const {
  Document doc = unsigned_document();
  doc["signature"] = to_hex(signature);
  return doc;
}

AttributeAssertion AttributeAssertion::from_document(const Document& doc) {
  if (get_string(doc, "type") != "attribute-assertion" || doc.size() != 11) {
    throw Error(ErrorCode::kParseError, "not an attribute assertion");
  }
  AttributeAssertion a;
  a.holder = SubjectName::parse(get_string(doc, "holder"));
  a.holder_serial = get_uint(doc, "holder_serial");
  a.issuer = SubjectName::parse(get_string(doc, "issuer"));
  a.vo = get_string(doc, "vo");
  a.fqans = fqans_from_array(get_array(doc, "fqans"));
  if (a.fqans.empty()) throw Error(ErrorCode::kParseError, "assertion without FQANs");
  a.validity = Window{get_int(doc, "not_before"), get_int(doc, "not_after")};
  if (!(a.validity.not_before < a.validity.not_after)) {
    throw Error(ErrorCode::kParseError, "assertion window is empty");
  }
  a.issued_at = get_int(doc, "issued_at");
  a.serial = get_uint(doc, "serial");
  a.signature = get_hex(doc, "signature");
  return a;
}

Document AttributeRequest::unsigned_document() const {
  Document doc{{"type", "attribute-request"},
               {"chain", requester_chain.to_document()},
               {"vo", vo},
               {"lifetime", lifetime},
               {"nonce", to_hex(nonce)},
               {"timestamp", timestamp}};
  if (requested_fqans) doc["requested_fqans"] = fqan_array(*requested_fqans);
  return doc;
}

Document AttributeRequest::to_document() const {
  Document doc = unsigned_document();
  doc["signature"] = to_hex(signature);
  return doc;
}

AttributeRequest AttributeRequest::from_document(const Document& doc) {
  if (get_string(doc, "type") != "attribute-request") {
    throw Error(ErrorCode::kParseError, "not an attribute request");
  }
  AttributeRequest r;
  r.requester_chain = CredentialChain::from_document(get_array(doc, "chain"));
  r.vo = get_string(doc, "vo");
  r.lifetime = get_int(doc, "lifetime");
  r.nonce = get_hex(doc, "nonce");
  r.timestamp = get_int(doc, "timestamp");
  r.signature = get_hex(doc, "signature");
  std::size_t expected = 7;
  if (doc.contains("requested_fqans")) {
    r.requested_fqans = fqans_from_array(get_array(doc, "requested_fqans"));
    ++expected;
  }
  if (doc.size() != expected) throw Error(ErrorCode::kParseError, "unexpected request fields");
  return r;
}

Document trusted_servers_document(const TrustedServers& servers) {
  Document doc = Document::object();
  for (const auto& [vo, key] : servers) doc[vo] = key.to_document();
  return doc;
}

TrustedServers trusted_servers_from_document(const Document& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::kParseError, "trusted servers must be an object");
  TrustedServers out;
  for (const auto& [vo, key] : doc.items()) out.emplace(vo, PublicKey::from_document(key));
  return out;
}

// --- client -----------------------------------------------------------------

AttributeRequest build_request(const CredentialChain& chain, const SecretKey& leaf_key,
                               const std::string& vo,
                               std::optional<std::vector<Fqan>> requested_fqans,
                               Timestamp lifetime, Timestamp now) {
  ValidationReport report = validate_chain_locally(chain, now);
  if (!report.accepted) {
    throw Error(ErrorCode::kInvalidChain, std::string(validation_rule_name(report.rule)) + ": " +
                                              report.detail);
  }
  if (!(leaf_key.public_key() == chain.leaf_public_key())) {
    throw Error(ErrorCode::kInvalidChain, "private key does not match the chain leaf");
  }
  AttributeRequest req;
  req.requester_chain = chain;
  req.vo = vo;
  req.requested_fqans = std::move(requested_fqans);
  req.lifetime = lifetime;
  req.nonce = random_bytes(AttributeRequest::kNonceSize);
  req.timestamp = now;
  req.signature = leaf_key.sign(canonical_serialize(req.unsigned_document()));
  return req;
}

// --- server -----------------------------------------------------------------

bool NonceCache::check_and_insert(const Bytes& nonce, Timestamp request_time, Timestamp now,
                                  Timestamp skew) {
  std::lock_guard lock(mutex_);
  for (auto it = expiry_.begin(); it != expiry_.end();) {
    it = it->second < now ? expiry_.erase(it) : std::next(it);
  }
  return expiry_.emplace(nonce, request_time + skew).second;
}

std::size_t NonceCache::size() const {
  std::lock_guard lock(mutex_);
  return expiry_.size();
}

AttributeAssertion handle_request(const AttributeRequest& request, const VoRegistry& registry,
                                  const ServerIdentity& server, const ServerPolicy& policy,
                                  NonceCache& nonces, std::uint64_t serial, Timestamp now) {
  if (request.vo != policy.vo || registry.vo() != policy.vo) {
    throw Error(ErrorCode::kMalformedRequest, "this server does not serve VO '" + request.vo + "'");
  }
  if (request.nonce.size() != AttributeRequest::kNonceSize) {
    throw Error(ErrorCode::kMalformedRequest, "nonce must be 16 bytes");
  }
  if (request.lifetime <= 0) throw Error(ErrorCode::kMalformedRequest, "lifetime must be positive");

  ValidationReport report = validate_chain(request.requester_chain, policy.trust_anchors,
                                           policy.revocation_lists, now);
  if (!report.accepted) {
    throw Error(ErrorCode::kAuthenticationFailed,
                "requester chain rejected: " + std::string(validation_rule_name(report.rule)) +
                    ": " + report.detail);
  }
  if (!request.requester_chain.leaf_public_key().verify(
          canonical_serialize(request.unsigned_document()), request.signature)) {
    throw Error(ErrorCode::kAuthenticationFailed, "request signature does not verify");
  }
  if (std::llabs(request.timestamp - now) > policy.clock_skew) {
    throw Error(ErrorCode::kAuthenticationFailed, "request timestamp outside the allowed skew");
  }
  if (!nonces.check_and_insert(request.nonce, request.timestamp, now, policy.clock_skew)) {
    throw Error(ErrorCode::kReplayDetected, "request nonce already used");
  }

  const IdentityCredential& holder = request.requester_chain.end_entity();
  std::vector<Fqan> entitled = registry.effective_attributes(holder.subject, now);
  if (entitled.empty()) {
    throw Error(ErrorCode::kUnknownUser, holder.subject.render() + " has no attributes in " +
                                             policy.vo);
  }

  std::vector<Fqan> issued;
  if (request.requested_fqans) {
    std::vector<std::string> offenders;
    for (const auto& f : *request.requested_fqans) {
      if (std::find(entitled.begin(), entitled.end(), f) == entitled.end()) {
        offenders.push_back(f.render());
      }
    }
    if (!offenders.empty()) {
      std::string joined;
      for (const auto& o : offenders) joined += (joined.empty() ? "" : ", ") + o;
      throw Error(ErrorCode::kUnauthorizedAttributes, "not entitled to " + joined, offenders);
    }
    issued = *request.requested_fqans;
  } else {
    issued = entitled;
  }
  for (auto& forced : registry.forced_attributes(holder.subject, now)) {
    issued.push_back(std::move(forced));
  }
  sort_unique(issued);

  AttributeAssertion a;
  a.holder = holder.subject;
  a.holder_serial = holder.serial;
  a.issuer = server.credential.subject;
  a.vo = policy.vo;
  a.fqans = std::move(issued);
  a.validity = Window{now, now + std::min(request.lifetime, policy.max_assertion_lifetime)};
  a.issued_at = now;
  a.serial = serial;
  a.signature = server.key.sign(canonical_serialize(a.unsigned_document()));
  return a;
}

AttributeServer::AttributeServer(VoStore& store, ServerIdentity identity, ServerPolicy policy)
    : store_(store), identity_(std::move(identity)), policy_(std::move(policy)) {
  if (policy_.max_assertion_lifetime <= 0) {
    throw Error(ErrorCode::kConfigError, "max_assertion_lifetime must be positive");
  }
}

AttributeAssertion AttributeServer::handle(const AttributeRequest& request, Timestamp now) {
  return store_.read([&](const VoRegistry& registry) {
    return handle_request(request, registry, identity_, policy_, nonces_, next_serial_++, now);
  });
}

HttpResponse AttributeServer::handle_http(const std::string& body, Timestamp now) {
  try {
    AttributeRequest req;
    try {
      req = AttributeRequest::from_document(canonical_parse(body));
    } catch (const Error& e) {
      throw Error(ErrorCode::kMalformedRequest, e.what());
    }
    return HttpResponse{200, canonical_serialize(handle(req, now).to_document())};
  } catch (const Error& e) {
    return error_response(e);
  }
}

void AttributeService::add(AttributeServer& server) { by_vo_[server.policy().vo] = &server; }

HttpResponse AttributeService::handle_http(const std::string& body, Timestamp now) {
  std::string vo;
  try {
    vo = get_string(canonical_parse(body), "vo");
  } catch (const Error& e) {
    return error_response(Error(ErrorCode::kMalformedRequest, e.what()));
  }
  auto it = by_vo_.find(vo);
  if (it == by_vo_.end()) {
    return error_response(Error(ErrorCode::kMalformedRequest, "no server for VO '" + vo + "'"));
  }
  return it->second->handle_http(body, now);
}

// --- verification -----------------------------------------------------------

bool verify_assertion(const AttributeAssertion& assertion, const TrustedServers& trusted_servers,
                      const CredentialChain& holder_chain, Timestamp now) {
  auto key = trusted_servers.find(assertion.vo);
  if (key == trusted_servers.end()) return false;
  if (!key->second.verify(canonical_serialize(assertion.unsigned_document()),
                          assertion.signature)) {
    return false;
  }
  if (!assertion.validity.contains(now)) return false;
  if (holder_chain.identities.empty()) return false;
  const IdentityCredential& ee = holder_chain.end_entity();
  if (ee.subject != assertion.holder || ee.serial != assertion.holder_serial) return false;
  return std::all_of(assertion.fqans.begin(), assertion.fqans.end(),
                     [&](const Fqan& f) { return f.vo() == assertion.vo; });
}

bool verify_encoded_assertion(std::string_view encoded, const PublicKey& key) {
  try {
    auto a = AttributeAssertion::from_document(canonical_parse(encoded));
    return key.verify(canonical_serialize(a.unsigned_document()), a.signature);
  } catch (const Error&) {
    return false;
  }
}

std::vector<AttributeAssertion> fetch_attributes(const std::vector<AttributeSource>& sources,
                                                 const CredentialChain& chain,
                                                 const SecretKey& leaf_key, Timestamp lifetime,
                                                 const TrustedServers& trusted_servers,
                                                 const Transport& transport, Timestamp now) {
  if (sources.empty()) throw Error(ErrorCode::kInvalidArgument, "no attribute servers given");
  std::vector<AttributeAssertion> out;
  for (const auto& source : sources) {
    AttributeRequest req = build_request(chain, leaf_key, source.vo, source.subset, lifetime, now);
    HttpResponse res;
    try {
      res = transport(source.endpoint, kAttributesPath, canonical_serialize(req.to_document()));
    } catch (const Error& e) {
      throw Error(ErrorCode::kTransportError, source.endpoint + ": " + e.what(), {source.endpoint});
    }
    if (res.status != 200) throw_error_response(res, source.endpoint);
    AttributeAssertion a;
    try {
      a = AttributeAssertion::from_document(canonical_parse(res.body));
    } catch (const Error& e) {
      throw Error(ErrorCode::kTransportError,
                  source.endpoint + ": malformed response: " + e.what(), {source.endpoint});
    }
    if (a.vo != source.vo || !verify_assertion(a, trusted_servers, chain, now)) {
      throw Error(ErrorCode::kAuthenticationFailed,
                  source.endpoint + ": assertion for " + source.vo + " does not verify",
                  {source.endpoint});
    }
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace gridauth
