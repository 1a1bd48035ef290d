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

// Attribute authority: the signed request/response protocol through which a
// user obtains a signed attribute assertion from a VO server.
//
//   client                                   server
//   build_request(chain, key, vo, subset) ──► handle_request
//     signed, carries the full chain           validate chain, request
//     and a fresh 16-byte nonce                signature, skew and nonce;
//                                              check subset ⊆ entitlement;
//   verify_assertion ◄──────────────────────── add forced groups and sign
//
// Mutual authentication happens at message level: the request is signed by
// the requester's leaf key and the response by the server key.

#include <atomic>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "gridauth/credential.h"
#include "gridauth/fqan.h"
#include "gridauth/registry_store.h"
#include "gridauth/transport.h"

namespace gridauth {

/// The signed "pseudo-certificate" binding a holder to FQANs.
struct AttributeAssertion {
  SubjectName holder;
  std::uint64_t holder_serial = 0;
  SubjectName issuer;
  std::string vo;
  std::vector<Fqan> fqans;
  Window validity;
  Timestamp issued_at = 0;
  std::uint64_t serial = 0;
  Bytes signature;

  Document unsigned_document() const;
  Document to_document() const;
  static AttributeAssertion from_document(const Document& doc);

  friend bool operator==(const AttributeAssertion&, const AttributeAssertion&) = default;
};

struct AttributeRequest {
  static constexpr std::size_t kNonceSize = 16;

  CredentialChain requester_chain;
  std::string vo;
  /// Absent: "everything I am entitled to".
  std::optional<std::vector<Fqan>> requested_fqans;
  Timestamp lifetime = kDefaultProxyLifetime;
  Bytes nonce;
  Timestamp timestamp = 0;
  Bytes signature;

  Document unsigned_document() const;
  Document to_document() const;
  static AttributeRequest from_document(const Document& doc);
};

struct ServerPolicy {
  std::string vo;
  Timestamp max_assertion_lifetime = kDefaultProxyLifetime;
  Timestamp clock_skew = 300;
  TrustStore trust_anchors;
  std::vector<RevocationList> revocation_lists;
};

/// Signing identity of an attribute server.
struct ServerIdentity {
  IdentityCredential credential;
  SecretKey key;
};

/// VO name -> public key of the server trusted to sign that VO's assertions.
using TrustedServers = std::map<std::string, PublicKey>;
Document trusted_servers_document(const TrustedServers& servers);
TrustedServers trusted_servers_from_document(const Document& doc);

/// Errors: kInvalidChain when the chain does not validate locally at `now`.
AttributeRequest build_request(const CredentialChain& chain, const SecretKey& leaf_key,
                               const std::string& vo,
                               std::optional<std::vector<Fqan>> requested_fqans,
                               Timestamp lifetime, Timestamp now);

/// Remembers request nonces for as long as their timestamps are acceptable.
class NonceCache {
 public:
  /// False when `nonce` was already seen. Expired entries are pruned.
  bool check_and_insert(const Bytes& nonce, Timestamp request_time, Timestamp now,
                        Timestamp skew);
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::map<Bytes, Timestamp> expiry_;
};

/// Server-side issuance against one registry snapshot.
/// Errors: kAuthenticationFailed, kReplayDetected, kUnknownUser,
/// kUnauthorizedAttributes (details = offending FQANs), kMalformedRequest.
AttributeAssertion handle_request(const AttributeRequest& request, const VoRegistry& registry,
                                  const ServerIdentity& server, const ServerPolicy& policy,
                                  NonceCache& nonces, std::uint64_t serial, Timestamp now);

/// A long-lived attribute server for one VO.
class AttributeServer {
 public:
  AttributeServer(VoStore& store, ServerIdentity identity, ServerPolicy policy);

  AttributeAssertion handle(const AttributeRequest& request, Timestamp now);
  /// Body in, canonical assertion or {code, detail} document out.
  HttpResponse handle_http(const std::string& body, Timestamp now);

  const ServerPolicy& policy() const { return policy_; }
  const ServerIdentity& identity() const { return identity_; }
  PublicKey public_key() const { return identity_.credential.public_key; }

 private:
  VoStore& store_;
  ServerIdentity identity_;
  ServerPolicy policy_;
  NonceCache nonces_;
  std::atomic<std::uint64_t> next_serial_{1};
};

/// Dispatches `/attributes` bodies to the server hosting the request's VO.
class AttributeService {
 public:
  void add(AttributeServer& server);
  HttpResponse handle_http(const std::string& body, Timestamp now);

 private:
  std::map<std::string, AttributeServer*> by_vo_;
};

/// True iff the signature verifies under trusted_servers[a.vo], `now` lies in
/// the assertion window, and the assertion names the chain's end entity
/// (subject and serial).
bool verify_assertion(const AttributeAssertion& assertion, const TrustedServers& trusted_servers,
                      const CredentialChain& holder_chain, Timestamp now);

/// Parse + signature check under `key`; false on any failure.
bool verify_encoded_assertion(std::string_view encoded, const PublicKey& key);

struct AttributeSource {
  std::string endpoint;
  std::string vo;
  std::optional<std::vector<Fqan>> subset;
};

/// Contacts each source in order and verifies every assertion received.
/// Fails fast: the first error aborts, annotated with its endpoint.
std::vector<AttributeAssertion> fetch_attributes(const std::vector<AttributeSource>& sources,
                                                 const CredentialChain& chain,
                                                 const SecretKey& leaf_key, Timestamp lifetime,
                                                 const TrustedServers& trusted_servers,
                                                 const Transport& transport, Timestamp now);

inline constexpr const char* kAttributesPath = "/attributes";

}  // namespace gridauth
