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

// Shared test fixtures: a small PKI, users with proxies, VO servers wired
// onto a loopback network, and scratch directories.

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "gridauth/admin.h"
#include "gridauth/authority.h"
#include "gridauth/credential.h"
#include "gridauth/registry_store.h"
#include "gridauth/transport.h"

namespace gridauth::testing {

/// 2003-03-24T00:00:00Z, a Monday.
inline constexpr Timestamp kT0 = 1048464000;
inline constexpr Timestamp kDay = 86400;
inline constexpr Timestamp kYear = 365 * kDay;

/// Removed recursively on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

struct User {
  CredentialChain chain;
  SecretKey key;

  const SubjectName& subject() const { return chain.end_entity().subject; }
};

/// Root CA valid [kT0 - 1 year, kT0 + 10 years).
class TestPki {
 public:
  explicit TestPki(const std::string& ca_subject = "/C=IT/O=INFN/CN=INFN CA");

  CertificateAuthority& ca() { return ca_; }
  const TrustStore& anchors() const { return anchors_; }

  /// Identity valid [kT0 - 30 days, kT0 + 1 year) unless `window` is given.
  User issue(const std::string& subject);
  User issue(const std::string& subject, Window window);
  /// The user's chain with a fresh proxy prepended.
  User proxy(const User& user, Timestamp now, Timestamp lifetime = kDefaultProxyLifetime,
             std::vector<Extension> extensions = {});

  RevocationList revoke(std::set<std::uint64_t> serials, Timestamp issued_at);

 private:
  CertificateAuthority ca_;
  TrustStore anchors_;
};

/// One VO with an attribute server reachable on a loopback network.
struct VoSite {
  std::string vo;
  std::string endpoint;
  std::unique_ptr<VoStore> store;
  std::unique_ptr<AttributeServer> server;
  std::unique_ptr<AdminService> admin;
};

/// Owner subject used by make_vo_site.
inline constexpr const char* kVoOwner = "/C=IT/O=INFN/CN=VO Admin";

class TestGrid {
 public:
  TestGrid();

  TestPki& pki() { return pki_; }
  LoopbackNetwork& network() { return network_; }
  Transport transport() const { return network_.transport(); }
  const TrustedServers& trusted_servers() const { return trusted_; }

  /// Creates an in-memory VO store, an attribute server signing with a key
  /// issued by the test CA, and admin endpoints, at `endpoint`.
  VoSite& add_vo(const std::string& vo, const std::string& endpoint, Timestamp now = kT0);
  VoSite& site(const std::string& vo);

  /// Clock used by loopback admin endpoints.
  Timestamp clock = kT0;

 private:
  TestPki pki_;
  LoopbackNetwork network_;
  TrustedServers trusted_;
  std::vector<std::unique_ptr<VoSite>> sites_;
};

/// Shorthand for group lookups in tests.
GroupId G(const VoRegistry& r, const std::string& path);
std::vector<std::string> rendered(const std::vector<Fqan>& fqans);

}  // namespace gridauth::testing
