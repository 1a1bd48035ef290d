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


#include "gridauth/credential.h"

#include <gtest/gtest.h>

#include <random>

#include "gridauth/error.h"
#include "testing/fixtures.h"

namespace gridauth {
namespace {

using testing::kDay;
using testing::kT0;
using testing::kYear;
using testing::TestPki;
using testing::User;

TEST(SubjectName, ParseRender) {
  auto s = SubjectName::parse("/C=IT/O=INFN/CN=Mario Rossi");
  ASSERT_EQ(s.components().size(), 3u);
  EXPECT_EQ(s.components()[2].value, "Mario Rossi");
  EXPECT_EQ(s.render(), "/C=IT/O=INFN/CN=Mario Rossi");
  EXPECT_TRUE(s.with("CN", "proxy").extends_by_one(s));
  EXPECT_FALSE(s.extends_by_one(s));
}

TEST(SubjectName, RejectsMalformed) {
  for (const char* bad : {"", "C=IT", "/", "/C", "/=x", "/C=", "/C=IT/", "/C=I\nT"}) {
    EXPECT_THROW(SubjectName::parse(bad), Error) << bad;
  }
}

TEST(SubjectName, RoundTripProperty) {
  std::mt19937_64 rng(7);
  const std::string alphabet = "abcXYZ019 .-_=@'\"";
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<SubjectName::Component> parts;
    int n = 1 + static_cast<int>(rng() % 5);
    for (int i = 0; i < n; ++i) {
      std::string attr, value;
      for (int k = 0, len = 1 + static_cast<int>(rng() % 4); k < len; ++k) {
        attr += "ABCOU"[rng() % 5];
      }
      for (int k = 0, len = 1 + static_cast<int>(rng() % 12); k < len; ++k) {
        value += alphabet[rng() % alphabet.size()];
      }
      parts.push_back({attr, value});
    }
    SubjectName s(parts);
    EXPECT_EQ(SubjectName::parse(s.render()), s);
  }
}

TEST(Crypto, SignVerify) {
  SecretKey k = SecretKey::generate();
  Bytes sig = k.sign("hello");
  EXPECT_TRUE(k.public_key().verify("hello", sig));
  EXPECT_FALSE(k.public_key().verify("hellp", sig));
  EXPECT_FALSE(SecretKey::generate().public_key().verify("hello", sig));
  EXPECT_EQ(k.public_key().scheme(), "ed25519");
}

TEST(IssueIdentity, VerifiesUnderIssuerKey) {
  TestPki pki;
  SecretKey key = SecretKey::generate();
  auto cred = issue_identity(pki.ca(), SubjectName::parse("/O=Grid/CN=alice"), key.public_key(),
                             Window{kT0, kT0 + kYear}, false);
  EXPECT_TRUE(verify_encoded_identity(canonical_serialize(cred.to_document()),
                                      pki.ca().credential().public_key));
  EXPECT_FALSE(cred.self_signed());
}

TEST(IssueIdentity, SerialsAreMonotone) {
  TestPki pki;
  std::uint64_t last = 0;
  for (int i = 0; i < 5; ++i) {
    User u = pki.issue("/O=Grid/CN=u" + std::to_string(i));
    EXPECT_GT(u.chain.end_entity().serial, last);
    last = u.chain.end_entity().serial;
  }
}

TEST(IssueIdentity, NonAuthorityIssuer) {
  TestPki pki;
  User u = pki.issue("/O=Grid/CN=alice");
  CertificateAuthority fake(u.chain.end_entity(), u.key, 1);
  try {
    fake.issue(SubjectName::parse("/O=Grid/CN=bob"), SecretKey::generate().public_key(),
               Window{kT0, kT0 + kDay}, false);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotAnAuthority);
  }
}

TEST(IssueIdentity, WindowPastIssuerExpiry) {
  TestPki pki;
  const Timestamp ca_end = pki.ca().credential().validity.not_after;
  try {
    pki.issue("/O=Grid/CN=alice", Window{kT0, ca_end + 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kWindowOutOfRange);
  }
}

TEST(CreateProxy, DefaultLifetimeIsTwelveHours) {
  TestPki pki;
  User u = pki.issue("/O=Grid/CN=alice");
  ProxyResult p = create_proxy(u.chain, u.key, kT0);
  EXPECT_EQ(p.proxy.validity.not_before, kT0);
  EXPECT_EQ(p.proxy.validity.not_after, kT0 + 43200);
  EXPECT_EQ(p.proxy.subject.render(), "/O=Grid/CN=alice/CN=proxy");
  EXPECT_TRUE(p.warnings.empty());
  EXPECT_EQ(p.chain.size(), u.chain.size() + 1);
  EXPECT_TRUE(validate_chain(p.chain, pki.anchors(), {}, kT0).accepted);
}

TEST(CreateProxy, ClampsToIssuerExpiry) {
  TestPki pki;
  User u = pki.issue("/O=Grid/CN=alice", Window{kT0 - kDay, kT0 + 2 * kDay});
  ProxyResult p = create_proxy(u.chain, u.key, kT0, 7 * kDay);
  EXPECT_EQ(p.proxy.validity.not_after, kT0 + 2 * kDay);
  EXPECT_EQ(p.warnings.size(), 1u);
}

TEST(CreateProxy, ExpiredIssuer) {
  TestPki pki;
  User u = pki.issue("/O=Grid/CN=alice", Window{kT0 - 2 * kDay, kT0 - kDay});
  try {
    create_proxy(u.chain, u.key, kT0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidChain);
  }
}

TEST(CreateProxy, ProxyOfProxy) {
  TestPki pki;
  User u = pki.proxy(pki.issue("/O=Grid/CN=alice"), kT0);
  User p2 = pki.proxy(u, kT0 + 10);
  EXPECT_EQ(p2.chain.leaf_subject().render(), "/O=Grid/CN=alice/CN=proxy/CN=proxy");
  EXPECT_EQ(p2.chain.proxies[0].validity.not_after, kT0 + 43200);
  EXPECT_TRUE(validate_chain(p2.chain, pki.anchors(), {}, kT0 + 20).accepted);
}

TEST(CreateProxy, CopiesExtensionsVerbatim) {
  TestPki pki;
  User u = pki.issue("/O=Grid/CN=alice");
  std::vector<Extension> ext = {{"one", false, {1, 2}}, {"two", true, {}}};
  ProxyResult p = create_proxy(u.chain, u.key, kT0, 3600, ext);
  EXPECT_EQ(p.proxy.extensions, ext);
}

ValidationRule rule_of(const CredentialChain& chain, const TestPki& pki, Timestamp now,
                       std::span<const RevocationList> crls = {}) {
  return validate_chain(chain, pki.anchors(), crls, now).rule;
}

TEST(ValidateChain, AcceptsWellFormed) {
  TestPki pki;
  User p = pki.proxy(pki.issue("/O=Grid/CN=alice"), kT0);
  auto report = validate_chain(p.chain, pki.anchors(), {}, kT0 + 60);
  EXPECT_TRUE(report.accepted);
  EXPECT_EQ(report.rule, ValidationRule::kOk);
}

TEST(ValidateChain, Revoked) {
  TestPki pki;
  User u = pki.issue("/O=Grid/CN=alice");
  User p = pki.proxy(u, kT0);
  std::vector<RevocationList> crls = {pki.revoke({u.chain.end_entity().serial}, kT0 - 10)};
  EXPECT_EQ(rule_of(p.chain, pki, kT0, crls), ValidationRule::kRevoked);
}

TEST(ValidateChain, IgnoresRevocationListsNotYetIssuedOrForged) {
  TestPki pki;
  User u = pki.issue("/O=Grid/CN=alice");
  std::vector<RevocationList> future = {pki.revoke({u.chain.end_entity().serial}, kT0 + 10)};
  EXPECT_EQ(rule_of(u.chain, pki, kT0, future), ValidationRule::kOk);
  RevocationList forged = pki.revoke({}, kT0 - 10);
  forged.revoked_serials.insert(u.chain.end_entity().serial);
  std::vector<RevocationList> crls = {forged};
  EXPECT_EQ(rule_of(u.chain, pki, kT0, crls), ValidationRule::kOk);
}

TEST(ValidateChain, CriticalityRule) {
  TestPki pki;
  User u = pki.issue("/O=Grid/CN=alice");
  User soft = pki.proxy(u, kT0, 3600, {{"site-hint", false, {9}}});
  User hard = pki.proxy(u, kT0, 3600, {{"site-hint", true, {9}}});
  EXPECT_EQ(rule_of(soft.chain, pki, kT0), ValidationRule::kOk);
  EXPECT_EQ(rule_of(hard.chain, pki, kT0), ValidationRule::kUnknownCriticalExtension);
  ValidationOptions understood{{"site-hint"}};
  EXPECT_TRUE(validate_chain(hard.chain, pki.anchors(), {}, kT0, understood).accepted);
}

TEST(ValidateChain, Windows) {
  TestPki pki;
  User p = pki.proxy(pki.issue("/O=Grid/CN=alice"), kT0);
  EXPECT_EQ(rule_of(p.chain, pki, kT0 - 1), ValidationRule::kNotYetValid);
  EXPECT_EQ(rule_of(p.chain, pki, kT0 + 43200), ValidationRule::kExpired);
  EXPECT_EQ(rule_of(p.chain, pki, kT0 + 43199), ValidationRule::kOk);
}

TEST(ValidateChain, UntrustedRoot) {
  TestPki pki;
  TestPki other("/O=Elsewhere/CN=Rogue CA");
  User u = other.issue("/O=Grid/CN=alice");
  EXPECT_EQ(rule_of(u.chain, pki, kT0), ValidationRule::kUntrustedRoot);
}

TEST(ValidateChain, ImpostorRootWithSameName) {
  TestPki pki;
  TestPki impostor;  // same subject, different key
  User u = impostor.issue("/O=Grid/CN=alice");
  EXPECT_FALSE(validate_chain(u.chain, pki.anchors(), {}, kT0).accepted);
}

TEST(ValidateChain, BadSignatureAndBrokenLink) {
  TestPki pki;
  User p = pki.proxy(pki.issue("/O=Grid/CN=alice"), kT0);
  CredentialChain tampered = p.chain;
  tampered.proxies[0].validity.not_after += 1;
  EXPECT_EQ(rule_of(tampered, pki, kT0), ValidationRule::kBadSignature);

  User bob = pki.issue("/O=Grid/CN=bob");
  CredentialChain spliced = p.chain;
  spliced.identities[0] = bob.chain.identities[0];
  EXPECT_EQ(rule_of(spliced, pki, kT0), ValidationRule::kBrokenLink);
}

TEST(ValidateChain, ProxySubjectRule) {
  TestPki pki;
  User u = pki.issue("/O=Grid/CN=alice");
  // Hand-build a proxy with a wrong subject, correctly signed.
  SecretKey pk = SecretKey::generate();
  ProxyCredential proxy;
  proxy.subject = u.subject().with("CN", "other");
  proxy.issuer = u.subject();
  proxy.public_key = pk.public_key();
  proxy.serial = 5;
  proxy.validity = Window{kT0, kT0 + 100};
  proxy.signature = u.key.sign(canonical_serialize(proxy.unsigned_document()));
  CredentialChain chain = u.chain;
  chain.proxies.push_back(proxy);
  EXPECT_EQ(rule_of(chain, pki, kT0), ValidationRule::kProxySubject);
}

TEST(ValidateChain, EmptyChain) {
  TestPki pki;
  EXPECT_EQ(rule_of(CredentialChain{}, pki, kT0), ValidationRule::kEmptyChain);
}

TEST(ValidateChain, RevocationIsMonotone) {
  TestPki pki;
  std::mt19937_64 rng(11);
  std::vector<User> users;
  for (int i = 0; i < 6; ++i) users.push_back(pki.issue("/O=Grid/CN=u" + std::to_string(i)));
  for (int trial = 0; trial < 100; ++trial) {
    std::set<std::uint64_t> serials;
    for (int k = 0; k < 3; ++k) serials.insert(1 + rng() % 8);
    std::set<std::uint64_t> more = serials;
    more.insert(1 + rng() % 8);
    std::vector<RevocationList> a = {pki.revoke(serials, kT0 - 1)};
    std::vector<RevocationList> b = {pki.revoke(more, kT0 - 1)};
    for (const auto& u : users) {
      bool before = validate_chain(u.chain, pki.anchors(), a, kT0).accepted;
      bool after = validate_chain(u.chain, pki.anchors(), b, kT0).accepted;
      EXPECT_FALSE(!before && after);
    }
  }
}

TEST(Encoding, TamperedCredentialBytesNeverVerify) {
  TestPki pki;
  User u = pki.issue("/O=Grid/CN=alice");
  const std::string encoded = canonical_serialize(u.chain.end_entity().to_document());
  const PublicKey& ca_key = pki.ca().credential().public_key;
  ASSERT_TRUE(verify_encoded_identity(encoded, ca_key));
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    std::string mutated = encoded;
    std::size_t pos = rng() % mutated.size();
    mutated[pos] = static_cast<char>(mutated[pos] ^ (1 + rng() % 255));
    EXPECT_FALSE(verify_encoded_identity(mutated, ca_key)) << "offset " << pos;
  }
}

TEST(Files, ChainAndAuthorityRoundTrip) {
  testing::TempDir dir;
  TestPki pki;
  User p = pki.proxy(pki.issue("/O=Grid/CN=alice"), kT0);
  save_chain(dir / "chain", p.chain);
  EXPECT_EQ(load_chain(dir / "chain"), p.chain);
  pki.ca().save(dir / "ca");
  auto loaded = CertificateAuthority::load(dir / "ca");
  EXPECT_EQ(loaded.credential(), pki.ca().credential());
  EXPECT_EQ(loaded.next_serial(), pki.ca().next_serial());
  EXPECT_EQ(std::filesystem::status(dir / "ca").permissions() & std::filesystem::perms::group_all,
            std::filesystem::perms::none);
}

}  // namespace
}  // namespace gridauth
