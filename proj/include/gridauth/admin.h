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

// Administration service. Every call is a signed envelope POSTed to the
// endpoint path; the envelope carries the caller's chain, a nonce and a
// timestamp, and is signed with the chain's leaf key.
//
//   Core           /core/whoami
//   Admin          /admin/create-group /admin/link-group /admin/add-user
//                  /admin/grant /admin/revoke-grant /admin/delegate
//                  /admin/list-users
//   History        /history
//   Request        /request/submit /request/list /request/decide
//   Compatibility  /compat/userlist

#include <string>
#include <vector>

#include "gridauth/authority.h"
#include "gridauth/credential.h"
#include "gridauth/registry_store.h"
#include "gridauth/transport.h"

namespace gridauth {

struct AdminEnvelope {
  CredentialChain chain;
  std::string path;
  Document params = Document::object();
  Bytes nonce;
  Timestamp timestamp = 0;
  Bytes signature;

  Document unsigned_document() const;
  Document to_document() const;
  static AdminEnvelope from_document(const Document& doc);

  static AdminEnvelope sign(const CredentialChain& chain, const SecretKey& leaf_key,
                            std::string path, Document params, Timestamp now);
};

/// Every endpoint path served by AdminService.
const std::vector<std::string>& admin_paths();

class AdminService {
 public:
  AdminService(VoStore& store, TrustStore anchors, std::vector<RevocationList> revocation_lists,
               Timestamp clock_skew = 300);

  /// Runs an already-authenticated call. Errors: kNotAuthorized,
  /// kUnknownEntity, kUnknownScope, kMalformedRequest, and registry errors.
  Document dispatch(const SubjectName& actor, const std::string& path, const Document& params,
                    Timestamp now);

  /// Authenticates the envelope, then dispatches. Errors:
  /// kAuthenticationFailed, kReplayDetected, plus those of dispatch().
  Document handle(const AdminEnvelope& envelope, Timestamp now);

  HttpResponse handle_http(const std::string& path, const std::string& body, Timestamp now);

  /// Registers every endpoint on `server`, using the wall clock.
  void install(HttpServer& server);
  void install(LoopbackNetwork& network, const std::string& endpoint,
               std::function<Timestamp()> clock);

 private:
  VoStore& store_;
  TrustStore anchors_;
  std::vector<RevocationList> revocation_lists_;
  Timestamp clock_skew_;
  NonceCache nonces_;
};

/// Client side: signs `params` for `path`, sends it, returns the result
/// document. Remote errors are rethrown with their original code.
class AdminClient {
 public:
  AdminClient(std::string endpoint, CredentialChain chain, SecretKey key, Transport transport);

  Document call(const std::string& path, Document params, Timestamp now) const;

  /// Subjects currently holding `fqan`, sorted by rendered string.
  std::vector<SubjectName> userlist(const Fqan& fqan, Timestamp now) const;

 private:
  std::string endpoint_;
  CredentialChain chain_;
  SecretKey key_;
  Transport transport_;
};

Timestamp wall_clock_now();

}  // namespace gridauth
