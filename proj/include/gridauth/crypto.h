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

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "gridauth/canonical.h"

namespace gridauth {

/// Identifier of the one signature scheme used throughout the toolkit.
inline constexpr std::string_view kSignatureScheme = "ed25519";
/// Identifier written into audit-log headers.
inline constexpr std::string_view kDigestName = "sha-256";

using Digest = std::array<std::uint8_t, 32>;

class PublicKey {
 public:
  PublicKey() = default;
  PublicKey(std::string scheme, Bytes key) : scheme_(std::move(scheme)), key_(std::move(key)) {}

  const std::string& scheme() const { return scheme_; }
  const Bytes& bytes() const { return key_; }
  bool empty() const { return key_.empty(); }

  /// False (never throws) for a wrong scheme, malformed key or bad signature.
  bool verify(std::span<const std::uint8_t> message, std::span<const std::uint8_t> signature) const;
  bool verify(std::string_view message, std::span<const std::uint8_t> signature) const;

  Document to_document() const;
  static PublicKey from_document(const Document& doc);

  friend bool operator==(const PublicKey&, const PublicKey&) = default;

 private:
  std::string scheme_;
  Bytes key_;
};

/// Owns secret key material; the buffer is wiped on destruction.
class SecretKey {
 public:
  SecretKey() = default;
  explicit SecretKey(Bytes secret);
  SecretKey(const SecretKey& other) = default;
  SecretKey(SecretKey&& other) noexcept = default;
  SecretKey& operator=(const SecretKey& other) = default;
  SecretKey& operator=(SecretKey&& other) noexcept = default;
  ~SecretKey();

  static SecretKey generate();

  Bytes sign(std::span<const std::uint8_t> message) const;
  Bytes sign(std::string_view message) const;
  PublicKey public_key() const;
  bool empty() const { return secret_.empty(); }

  Document to_document() const;
  static SecretKey from_document(const Document& doc);

  /// Key files are written with mode 0600.
  void save(const std::filesystem::path& path) const;
  static SecretKey load(const std::filesystem::path& path);

 private:
  Bytes secret_;
};

Digest sha256(std::span<const std::uint8_t> data);
Digest sha256(std::string_view data);

Bytes random_bytes(std::size_t n);
std::uint64_t random_u64();

}  // namespace gridauth
