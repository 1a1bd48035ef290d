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

// Client-side proxy tooling: gather attribute assertions from one or more VO
// servers, embed them in a fresh proxy as a non-critical extension, and
// inspect the result.

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gridauth/authority.h"
#include "gridauth/credential.h"

namespace gridauth {

inline constexpr const char* kVomsExtensionLabel = "voms-pseudo-certs";

/// Opaque caller-provided data (for example a Kerberos ticket). Never parsed.
struct UserSupplied {
  std::string label;
  Bytes data;

  friend bool operator==(const UserSupplied&, const UserSupplied&) = default;
};

struct VomsExtensionPayload {
  std::vector<AttributeAssertion> assertions;
  std::optional<UserSupplied> user_supplied;

  Bytes encode() const;
  /// Errors: kMalformedPayload.
  static VomsExtensionPayload decode(std::span<const std::uint8_t> bytes);

  friend bool operator==(const VomsExtensionPayload&, const VomsExtensionPayload&) = default;
};

/// Proxy file contents: the chain (leaf proxy first) and the proxy's key.
struct ProxyBundle {
  CredentialChain chain;
  SecretKey key;

  const ProxyCredential& proxy() const;

  Document to_document() const;
  static ProxyBundle from_document(const Document& doc);
  /// Written with mode 0600.
  void save(const std::filesystem::path& path) const;
  static ProxyBundle load(const std::filesystem::path& path);
};

struct ProxyInitOptions {
  std::vector<AttributeSource> sources;
  Timestamp lifetime = kDefaultProxyLifetime;
  std::optional<UserSupplied> user_supplied;
  TrustedServers trusted_servers;
};

struct ProxyInitResult {
  ProxyBundle bundle;
  std::vector<AttributeAssertion> assertions;
  std::vector<std::string> warnings;
};

/// Fetches assertions from every source (fail-fast), then derives a proxy
/// carrying them. Without sources or user data no extension is added.
ProxyInitResult proxy_init(const CredentialChain& chain, const SecretKey& key,
                           const ProxyInitOptions& options, const Transport& transport,
                           Timestamp now);

/// Decoded assertions of the labeled extension, or empty when it is absent.
/// Errors: kMalformedPayload.
std::vector<AttributeAssertion> extract_assertions(const ProxyCredential& proxy);
std::optional<VomsExtensionPayload> extract_payload(const ProxyCredential& proxy);

struct AssertionStatus {
  std::string vo;
  std::vector<std::string> fqans;
  Window validity;
  /// "valid", "expired", "not-yet-valid", "bad-signature", "wrong-holder"
  /// or "unverified" (no key known for the VO).
  std::string status;
};

struct ProxyReport {
  std::string subject;
  std::string issuer;
  Window validity;
  Timestamp remaining = 0;
  bool has_attributes = false;
  std::optional<std::string> malformed;
  std::optional<std::string> user_supplied_label;
  std::vector<AssertionStatus> assertions;

  Document to_document() const;
  std::string to_text() const;
};

ProxyReport proxy_info(const ProxyBundle& bundle, const TrustedServers& trusted_servers,
                       Timestamp now);

}  // namespace gridauth
