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


#include "gridauth/proxy_tool.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "gridauth/error.h"
#include "testing/fixtures.h"

namespace gridauth {
namespace {

using testing::kT0;
using testing::rendered;
using testing::User;

class ProxyToolTest : public ::testing::Test {
 protected:
  ProxyToolTest() {
    alice = grid.pki().issue("/C=IT/O=INFN/CN=Alice");
    const SubjectName owner = SubjectName::parse(testing::kVoOwner);
    for (const auto& [vo, endpoint] : {std::pair{"datagrid", "voms.dg:15000"}, {"cms", "voms.cms:15001"}}) {
      grid.add_vo(vo, endpoint).store->write([&](VoRegistry& r) {
        GroupId wp6 = r.create_group(owner, {r.root()}, "wp6", false, kT0);
        r.create_group(owner, {r.root()}, "watch", true, kT0);
        return r.grant(owner, Grant{0, alice.subject(), wp6, GrantKind::kMembership, "",
                                    TimeSchedule::always()},
                       kT0);
      });
    }
  }

  ProxyInitOptions options(std::vector<AttributeSource> sources) {
    ProxyInitOptions o;
    o.sources = std::move(sources);
    o.trusted_servers = grid.trusted_servers();
    return o;
  }
  ProxyInitResult init(std::vector<AttributeSource> sources, Timestamp now = kT0) {
    return proxy_init(alice.chain, alice.key, options(std::move(sources)), grid.transport(), now);
  }

  testing::TestGrid grid;
  User alice;
};

const AttributeSource kDatagrid{"voms.dg:15000", "datagrid", std::nullopt};
const AttributeSource kCms{"voms.cms:15001", "cms", std::nullopt};

TEST_F(ProxyToolTest, DefaultsOneVo) {
  auto result = init({kDatagrid});
  const ProxyCredential& p = result.bundle.proxy();
  EXPECT_EQ(p.validity.not_after - p.validity.not_before, 43200);
  ASSERT_EQ(p.extensions.size(), 1u);
  EXPECT_EQ(p.extensions[0].label, "voms-pseudo-certs");
  EXPECT_FALSE(p.extensions[0].critical);
  auto extracted = extract_assertions(p);
  ASSERT_EQ(extracted.size(), 1u);
  EXPECT_EQ(rendered(extracted[0].fqans), (std::vector<std::string>{"/datagrid", "/datagrid/wp6"}));
  EXPECT_EQ(result.bundle.chain.size(), alice.chain.size() + 1);
}

TEST_F(ProxyToolTest, TwoVosInOrderRoundTripByteForByte) {
  auto result = init({kDatagrid, kCms});
  auto extracted = extract_assertions(result.bundle.proxy());
  ASSERT_EQ(extracted.size(), 2u);
  EXPECT_EQ(extracted[0].vo, "datagrid");
  EXPECT_EQ(extracted[1].vo, "cms");
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(canonical_serialize(extracted[i].to_document()),
              canonical_serialize(result.assertions[i].to_document()));
  }
}

TEST_F(ProxyToolTest, SubsetFidelity) {
  auto result = init({{"voms.dg:15000", "datagrid", std::vector<Fqan>{Fqan::parse("/datagrid/wp6")}}});
  EXPECT_EQ(rendered(extract_assertions(result.bundle.proxy())[0].fqans),
            std::vector<std::string>{"/datagrid/wp6"});

  grid.site("cms").store->write([&](VoRegistry& r) {
    return r.grant(SubjectName::parse(testing::kVoOwner),
                   Grant{0, alice.subject(), r.require_group("/cms/watch"), GrantKind::kMembership, "",
                         TimeSchedule::always()},
                   kT0);
  });
  auto forced = init({{"voms.cms:15001", "cms", std::vector<Fqan>{Fqan::parse("/cms/wp6")}}});
  EXPECT_EQ(rendered(extract_assertions(forced.bundle.proxy())[0].fqans),
            (std::vector<std::string>{"/cms/watch", "/cms/wp6"}));
}

TEST_F(ProxyToolTest, UserSuppliedBytesUntouched) {
  auto o = options({kDatagrid});
  Bytes ticket{0x00, 0xff, 0x10, '"', '\\'};
  o.user_supplied = UserSupplied{"krb5", ticket};
  auto result = proxy_init(alice.chain, alice.key, o, grid.transport(), kT0);
  auto payload = extract_payload(result.bundle.proxy());
  ASSERT_TRUE(payload.has_value());
  ASSERT_TRUE(payload->user_supplied.has_value());
  EXPECT_EQ(payload->user_supplied->label, "krb5");
  EXPECT_EQ(payload->user_supplied->data, ticket);
}

TEST_F(ProxyToolTest, FailFastWritesNothing) {
  grid.network().take_down("voms.cms:15001");
  testing::TempDir dir;
  try {
    auto result = init({kDatagrid, kCms});
    result.bundle.save(dir / "proxy");
    FAIL() << "proxy_init succeeded";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTransportError);
  }
  EXPECT_FALSE(std::filesystem::exists(dir / "proxy"));
}

TEST_F(ProxyToolTest, InvalidOwnChain) {
  auto expired = grid.pki().issue("/C=IT/O=INFN/CN=Old", Window{kT0 - 100, kT0 - 1});
  try {
    proxy_init(expired.chain, expired.key, options({kDatagrid}), grid.transport(), kT0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidChain);
  }
}

TEST_F(ProxyToolTest, NoSourcesMeansPlainProxy) {
  auto result = init({});
  EXPECT_TRUE(result.bundle.proxy().extensions.empty());
  EXPECT_TRUE(extract_assertions(result.bundle.proxy()).empty());
  EXPECT_FALSE(extract_payload(result.bundle.proxy()).has_value());
}

TEST_F(ProxyToolTest, ExtensionDoesNotChangeValidation) {
  auto with = init({kDatagrid});
  auto plain = grid.pki().proxy(alice, kT0);
  for (Timestamp t : {kT0, kT0 + 43199, kT0 + 43200, kT0 - 1}) {
    auto a = validate_chain(with.bundle.chain, grid.pki().anchors(), {}, t);
    auto b = validate_chain(plain.chain, grid.pki().anchors(), {}, t);
    EXPECT_EQ(a.accepted, b.accepted) << t;
    EXPECT_EQ(a.rule, b.rule) << t;
  }
}

TEST_F(ProxyToolTest, TruncatedPayloadIsMalformed) {
  auto result = init({kDatagrid});
  ProxyCredential p = result.bundle.proxy();
  p.extensions[0].payload.resize(p.extensions[0].payload.size() / 2);
  try {
    extract_assertions(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMalformedPayload);
  }
}

TEST_F(ProxyToolTest, PayloadRoundTrip) {
  auto result = init({kDatagrid, kCms});
  VomsExtensionPayload payload{result.assertions, UserSupplied{"x", {1, 2, 3}}};
  EXPECT_EQ(VomsExtensionPayload::decode(payload.encode()), payload);
}

TEST_F(ProxyToolTest, BundleFileRoundTrip) {
  testing::TempDir dir;
  auto result = init({kDatagrid});
  result.bundle.save(dir / "proxy");
  EXPECT_EQ(std::filesystem::status(dir / "proxy").permissions() & std::filesystem::perms::all,
            std::filesystem::perms::owner_read | std::filesystem::perms::owner_write);
  ProxyBundle loaded = ProxyBundle::load(dir / "proxy");
  EXPECT_EQ(loaded.chain, result.bundle.chain);
  EXPECT_EQ(loaded.key.public_key(), result.bundle.key.public_key());
}

TEST_F(ProxyToolTest, BundleKeyMustMatchLeaf) {
  auto result = init({});
  Document doc = result.bundle.to_document();
  doc["key"] = alice.key.to_document();
  EXPECT_THROW(ProxyBundle::from_document(doc), Error);
}

TEST_F(ProxyToolTest, InfoFreshProxy) {
  auto result = init({kDatagrid, kCms});
  ProxyReport report = proxy_info(result.bundle, grid.trusted_servers(), kT0 + 100);
  EXPECT_EQ(report.subject, "/C=IT/O=INFN/CN=Alice/CN=proxy");
  EXPECT_EQ(report.issuer, "/C=IT/O=INFN/CN=Alice");
  EXPECT_EQ(report.remaining, 43100);
  ASSERT_EQ(report.assertions.size(), 2u);
  for (const auto& a : report.assertions) EXPECT_EQ(a.status, "valid") << a.vo;
  EXPECT_EQ(report.assertions[0].fqans, (std::vector<std::string>{"/datagrid", "/datagrid/wp6"}));
  EXPECT_NE(report.to_text().find("/datagrid/wp6"), std::string::npos);
}

TEST_F(ProxyToolTest, InfoAssertionExpiresBeforeProxy) {
  auto o = options({kDatagrid});
  o.lifetime = 7200;
  auto result = proxy_init(alice.chain, alice.key, o, grid.transport(), kT0);
  // Splice a short assertion into a longer-lived proxy: the windows are independent.
  auto shortlived = fetch_attributes({kDatagrid}, alice.chain, alice.key, 600, grid.trusted_servers(),
                                     grid.transport(), kT0 + 10);
  VomsExtensionPayload payload{shortlived, std::nullopt};
  User proxy = grid.pki().proxy(alice, kT0, 7200, {Extension{kVomsExtensionLabel, false, payload.encode()}});
  ProxyBundle bundle{proxy.chain, proxy.key};
  ProxyReport report = proxy_info(bundle, grid.trusted_servers(), kT0 + 3600);
  EXPECT_GT(report.remaining, 0);
  ASSERT_EQ(report.assertions.size(), 1u);
  EXPECT_EQ(report.assertions[0].status, "expired");
  EXPECT_EQ(proxy_info(result.bundle, grid.trusted_servers(), kT0 + 3600).assertions[0].status, "valid");
}

TEST_F(ProxyToolTest, InfoStatuses) {
  auto result = init({kDatagrid});
  EXPECT_EQ(proxy_info(result.bundle, {}, kT0).assertions[0].status, "unverified");
  TrustedServers wrong = grid.trusted_servers();
  wrong["datagrid"] = wrong.at("cms");
  EXPECT_EQ(proxy_info(result.bundle, wrong, kT0).assertions[0].status, "bad-signature");

  User bob = grid.pki().issue("/C=IT/O=INFN/CN=Bob");
  auto payload = *extract_payload(result.bundle.proxy());
  User stolen = grid.pki().proxy(bob, kT0, 3600, {Extension{kVomsExtensionLabel, false, payload.encode()}});
  EXPECT_EQ(proxy_info(ProxyBundle{stolen.chain, stolen.key}, grid.trusted_servers(), kT0)
                .assertions[0]
                .status,
            "wrong-holder");
}

TEST_F(ProxyToolTest, InfoPlainProxy) {
  User plain = grid.pki().proxy(alice, kT0);
  ProxyReport report = proxy_info(ProxyBundle{plain.chain, plain.key}, grid.trusted_servers(), kT0);
  EXPECT_FALSE(report.has_attributes);
  EXPECT_NE(report.to_text().find("no VO attributes"), std::string::npos);
  EXPECT_EQ(report.to_document()["assertions"], Document::array());
}

TEST_F(ProxyToolTest, InfoMalformedPayloadReported) {
  User bad = grid.pki().proxy(alice, kT0, 3600, {Extension{kVomsExtensionLabel, false, Bytes{'{'}}});
  ProxyReport report = proxy_info(ProxyBundle{bad.chain, bad.key}, grid.trusted_servers(), kT0);
  EXPECT_TRUE(report.malformed.has_value());
}

}  // namespace
}  // namespace gridauth
