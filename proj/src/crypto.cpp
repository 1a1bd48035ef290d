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


#include "gridauth/crypto.h"

#include <sodium.h>

#include <mutex>

#include "gridauth/error.h"

namespace gridauth {
namespace {

void ensure_sodium() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) throw Error(ErrorCode::kIoError, "libsodium initialisation failed");
  });
}

std::span<const std::uint8_t> as_span(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

}  // namespace

bool PublicKey::verify(std::span<const std::uint8_t> message,
                       std::span<const std::uint8_t> signature) const {
  ensure_sodium();
  if (scheme_ != kSignatureScheme) return false;
  if (key_.size() != crypto_sign_PUBLICKEYBYTES) return false;
  if (signature.size() != crypto_sign_BYTES) return false;
  return crypto_sign_verify_detached(signature.data(), message.data(), message.size(),
                                     key_.data()) == 0;
}

bool PublicKey::verify(std::string_view message, std::span<const std::uint8_t> signature) const {
  return verify(as_span(message), signature);
}

Document PublicKey::to_document() const {
  return Document{{"scheme", scheme_}, {"key", to_hex(key_)}};
}

PublicKey PublicKey::from_document(const Document& doc) {
  PublicKey key(get_string(doc, "scheme"), get_hex(doc, "key"));
  if (doc.size() != 2) throw Error(ErrorCode::kParseError, "unexpected fields in public key");
  return key;
}

SecretKey::SecretKey(Bytes secret) : secret_(std::move(secret)) {
  if (secret_.size() != crypto_sign_SECRETKEYBYTES) {
    throw Error(ErrorCode::kInvalidArgument, "secret key has the wrong length");
  }
}

SecretKey::~SecretKey() {
  if (!secret_.empty()) sodium_memzero(secret_.data(), secret_.size());
}

SecretKey SecretKey::generate() {
  ensure_sodium();
  Bytes pk(crypto_sign_PUBLICKEYBYTES);
  Bytes sk(crypto_sign_SECRETKEYBYTES);
  crypto_sign_keypair(pk.data(), sk.data());
  return SecretKey(std::move(sk));
}

Bytes SecretKey::sign(std::span<const std::uint8_t> message) const {
  ensure_sodium();
  if (secret_.empty()) throw Error(ErrorCode::kInvalidArgument, "signing with an empty key");
  Bytes sig(crypto_sign_BYTES);
  crypto_sign_detached(sig.data(), nullptr, message.data(), message.size(), secret_.data());
  return sig;
}

Bytes SecretKey::sign(std::string_view message) const { return sign(as_span(message)); }

PublicKey SecretKey::public_key() const {
  ensure_sodium();
  Bytes pk(crypto_sign_PUBLICKEYBYTES);
  crypto_sign_ed25519_sk_to_pk(pk.data(), secret_.data());
  return PublicKey(std::string(kSignatureScheme), std::move(pk));
}

Document SecretKey::to_document() const {
  return Document{{"scheme", std::string(kSignatureScheme)}, {"secret", to_hex(secret_)}};
}

SecretKey SecretKey::from_document(const Document& doc) {
  if (get_string(doc, "scheme") != kSignatureScheme) {
    throw Error(ErrorCode::kParseError, "unsupported key scheme");
  }
  return SecretKey(get_hex(doc, "secret"));
}

void SecretKey::save(const std::filesystem::path& path) const {
  write_document(path, to_document(), 0600);
}

SecretKey SecretKey::load(const std::filesystem::path& path) {
  return from_document(read_document(path));
}

Digest sha256(std::span<const std::uint8_t> data) {
  ensure_sodium();
  Digest out{};
  crypto_hash_sha256(out.data(), data.data(), data.size());
  return out;
}

Digest sha256(std::string_view data) { return sha256(as_span(data)); }

Bytes random_bytes(std::size_t n) {
  ensure_sodium();
  Bytes out(n);
  randombytes_buf(out.data(), n);
  return out;
}

std::uint64_t random_u64() {
  ensure_sodium();
  std::uint64_t v = 0;
  randombytes_buf(&v, sizeof(v));
  return v;
}

}  // namespace gridauth
