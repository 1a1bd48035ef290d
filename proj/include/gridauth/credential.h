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

// Identity and proxy credentials, chains, revocation lists and chain
// validation. Credentials are canonical documents signed by their issuer;
// the signature covers the canonical serialization of every field except
// "signature" itself.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "gridauth/canonical.h"
#include "gridauth/crypto.h"
#include "gridauth/subject.h"

namespace gridauth {

/// Integer UTC seconds since the epoch.
using Timestamp = std::int64_t;

/// Default proxy (and assertion) lifetime: 12 hours.
inline constexpr Timestamp kDefaultProxyLifetime = 43200;

/// Half-open validity window [not_before, not_after).
struct Window {
  Timestamp not_before = 0;
  Timestamp not_after = 0;

  bool contains(Timestamp t) const { return not_before <= t && t < not_after; }
  bool within(const Window& outer) const {
    return outer.not_before <= not_before && not_after <= outer.not_after;
  }
  friend bool operator==(const Window&, const Window&) = default;
};

struct Extension {
  std::string label;
  bool critical = false;
  Bytes payload;

  friend bool operator==(const Extension&, const Extension&) = default;
};

struct IdentityCredential {
  SubjectName subject;
  SubjectName issuer;
  PublicKey public_key;
  std::uint64_t serial = 0;
  Window validity;
  bool is_authority = false;
  Bytes signature;

  bool self_signed() const { return subject == issuer; }

  /// Every field except the signature; this is what gets signed.
  Document unsigned_document() const;
  Document to_document() const;
  static IdentityCredential from_document(const Document& doc);

  friend bool operator==(const IdentityCredential&, const IdentityCredential&) = default;
};

struct ProxyCredential {
  SubjectName subject;
  SubjectName issuer;
  PublicKey public_key;
  std::uint64_t serial = 0;
  Window validity;
  std::vector<Extension> extensions;
  Bytes signature;

  const Extension* find_extension(std::string_view label) const;

  Document unsigned_document() const;
  Document to_document() const;
  static ProxyCredential from_document(const Document& doc);

  friend bool operator==(const ProxyCredential&, const ProxyCredential&) = default;
};

/// Leaf-first chain: proxies (leaf first), then the end-entity identity,
/// then its issuing authorities up to (optionally including) a trust anchor.
struct CredentialChain {
  std::vector<ProxyCredential> proxies;
  std::vector<IdentityCredential> identities;

  std::size_t size() const { return proxies.size() + identities.size(); }
  /// Throws kInvalidChain when the chain has no identity credential.
  const IdentityCredential& end_entity() const;
  const SubjectName& leaf_subject() const;
  const PublicKey& leaf_public_key() const;

  Document to_document() const;
  static CredentialChain from_document(const Document& doc);

  friend bool operator==(const CredentialChain&, const CredentialChain&) = default;
};

struct RevocationList {
  SubjectName issuer;
  std::set<std::uint64_t> revoked_serials;
  Timestamp issued_at = 0;
  Bytes signature;

  bool verify(const PublicKey& issuer_key) const;

  Document unsigned_document() const;
  Document to_document() const;
  static RevocationList from_document(const Document& doc);
};

/// An authority credential together with its signing key and serial counter.
/// Serials are handed out monotonically and persisted with the key.
class CertificateAuthority {
 public:
  CertificateAuthority(IdentityCredential credential, SecretKey key, std::uint64_t next_serial);

  /// Self-signed trust anchor.
  static CertificateAuthority create_root(const SubjectName& subject, Window validity);

  const IdentityCredential& credential() const { return credential_; }
  const SecretKey& key() const { return key_; }
  std::uint64_t next_serial() const { return next_serial_; }

  /// Errors: kNotAnAuthority, kWindowOutOfRange.
  IdentityCredential issue(const SubjectName& subject, const PublicKey& subject_key,
                           Window validity, bool is_authority);

  RevocationList issue_revocation_list(std::set<std::uint64_t> revoked, Timestamp issued_at) const;

  void save(const std::filesystem::path& path) const;
  static CertificateAuthority load(const std::filesystem::path& path);

 private:
  IdentityCredential credential_;
  SecretKey key_;
  std::uint64_t next_serial_;
};

/// Free-function form of CertificateAuthority::issue.
IdentityCredential issue_identity(CertificateAuthority& issuer, const SubjectName& subject,
                                  const PublicKey& subject_key, Window validity,
                                  bool is_authority);

struct ProxyResult {
  ProxyCredential proxy;
  SecretKey key;
  /// The input chain with the new proxy prepended.
  CredentialChain chain;
  std::vector<std::string> warnings;
};

/// Derives a proxy from the chain's leaf. The requested lifetime is clamped
/// to the issuer's expiry (with a warning) rather than rejected. The input
/// chain must be internally consistent and valid at `now`; it is not checked
/// against any trust store here. Errors: kInvalidChain.
ProxyResult create_proxy(const CredentialChain& chain, const SecretKey& leaf_key, Timestamp now,
                         Timestamp lifetime = kDefaultProxyLifetime,
                         std::vector<Extension> extensions = {});

class TrustStore {
 public:
  TrustStore() = default;
  explicit TrustStore(std::vector<IdentityCredential> anchors) : anchors_(std::move(anchors)) {}

  /// Loads every regular file in `dir` as one anchor credential.
  static TrustStore load_directory(const std::filesystem::path& dir);

  void add(IdentityCredential anchor) { anchors_.push_back(std::move(anchor)); }
  const IdentityCredential* find(const SubjectName& subject) const;
  const std::vector<IdentityCredential>& anchors() const { return anchors_; }

 private:
  std::vector<IdentityCredential> anchors_;
};

enum class ValidationRule {
  kOk,
  kEmptyChain,
  kMalformedChain,
  kBrokenLink,
  kBadSignature,
  kNotYetValid,
  kExpired,
  kUntrustedRoot,
  kRevoked,
  kNotAnAuthority,
  kProxySubject,
  kProxyWindow,
  kUnknownCriticalExtension,
};

std::string_view validation_rule_name(ValidationRule rule);

struct ValidationReport {
  bool accepted = false;
  ValidationRule rule = ValidationRule::kEmptyChain;
  /// Chain position (leaf = 0) of the failing element.
  std::size_t index = 0;
  std::string detail;

  static ValidationReport ok() { return {true, ValidationRule::kOk, 0, {}}; }
  Document to_document() const;
};

struct ValidationOptions {
  /// Critical extensions with these labels are accepted.
  std::set<std::string> understood_extensions;
};

/// Accepts iff every link verifies, every window contains `now`, the chain
/// roots at a trust anchor, no identity credential is listed in a verified
/// revocation list of its issuer, and every proxy appends exactly
/// "/CN=proxy" to its issuer's subject. Failures are reported, not thrown.
ValidationReport validate_chain(const CredentialChain& chain, const TrustStore& anchors,
                                std::span<const RevocationList> revocation_lists, Timestamp now,
                                const ValidationOptions& options = {});

/// Same checks minus trust-anchor and revocation: the chain's own last element
/// must be self-signed. Used client-side before deriving proxies.
ValidationReport validate_chain_locally(const CredentialChain& chain, Timestamp now);

/// Parses an encoded credential, revocation list or assertion document and
/// checks its signature under `key`. Any parse or structure failure is false.
bool verify_encoded_identity(std::string_view encoded, const PublicKey& key);
bool verify_encoded_proxy(std::string_view encoded, const PublicKey& key);
bool verify_encoded_revocation_list(std::string_view encoded, const PublicKey& key);

// Credential files.
void save_chain(const std::filesystem::path& path, const CredentialChain& chain);
CredentialChain load_chain(const std::filesystem::path& path);
std::vector<RevocationList> load_revocation_lists(std::span<const std::filesystem::path> paths);

}  // namespace gridauth
