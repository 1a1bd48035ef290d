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


#include "gridauth/lcas.h"

#include <gtest/gtest.h>

#include <random>

#include "gridauth/error.h"
#include "testing/fixtures.h"

namespace gridauth {
namespace {

using testing::kDay;
using testing::kT0;
using testing::User;

constexpr Timestamp kWednesday10 = 1048636800 + 10 * 3600;
constexpr Timestamp kSaturday10 = 1048896000 + 10 * 3600;

// Mints assertions directly so the site side can be tested without a VO server.
class Minter {
 public:
  explicit Minter(std::string vo) : vo_(std::move(vo)), key_(SecretKey::generate()) {}

  AttributeAssertion mint(const User& holder, std::vector<std::string> fqans, Window w) {
    AttributeAssertion a;
    a.holder = holder.subject();
    a.holder_serial = holder.chain.end_entity().serial;
    a.issuer = SubjectName::parse("/O=Grid/CN=voms." + vo_);
    a.vo = vo_;
    for (const auto& f : fqans) a.fqans.push_back(Fqan::parse(f));
    a.validity = w;
    a.issued_at = w.not_before;
    a.serial = ++serial_;
    a.signature = key_.sign(canonical_serialize(a.unsigned_document()));
    return a;
  }
  PublicKey public_key() const { return key_.public_key(); }

 private:
  std::string vo_;
  SecretKey key_;
  std::uint64_t serial_ = 0;
};

Document acl(std::initializer_list<std::pair<const char*, const char*>> rules) {
  Document out = Document::array();
  for (const auto& [effect, pattern] : rules) out.push_back(Document{{"effect", effect}, {"pattern", pattern}});
  return out;
}

JobSpec job(std::uint64_t seconds = 3600) {
  JobSpec j;
  j.executable = "/bin/sim";
  j.requested_wallclock_seconds = seconds;
  j.queue = "long";
  return j;
}

class LcasTest : public ::testing::Test {
 protected:
  LcasTest() : minter("datagrid") {
    alice = pki.issue("/C=IT/O=INFN/CN=Alice");
    bob = pki.issue("/C=IT/O=INFN/CN=Bob");
    trusted["datagrid"] = minter.public_key();
  }
  AttributeAssertion fresh(const User& u, std::vector<std::string> fqans) {
    return minter.mint(u, std::move(fqans), Window{kT0 - 60, kT0 + 3600});
  }
  Decision eval(std::vector<PluginSpec> specs, const User& u, std::vector<AttributeAssertion> a,
                const JobSpec& j = job(), Timestamp now = kT0) {
    return lcas_evaluate(SitePolicy(std::move(specs), trusted), u.chain, a, j, now);
  }

  testing::TestPki pki;
  Minter minter;
  User alice, bob;
  TrustedServers trusted;
};

PluginSpec voms(Document rules, bool require = true) {
  return {"voms", Document{{"acl", std::move(rules)}, {"require_assertion", require}}};
}
PluginSpec blacklist(std::vector<std::string> subjects, std::vector<std::string> patterns = {}) {
  return {"blacklist", Document{{"banned_subjects", subjects}, {"banned_fqan_patterns", patterns}}};
}
PluginSpec wallclock(std::uint64_t max, std::optional<TimeSchedule> window = std::nullopt) {
  Document cfg{{"max_seconds", max}};
  if (window) cfg["allowed_window"] = window->to_document();
  return {"wallclock", cfg};
}

TEST_F(LcasTest, EmptyChainDenies) {
  Decision d = eval({}, alice, {fresh(alice, {"/datagrid"})});
  EXPECT_FALSE(d.allowed);
  EXPECT_TRUE(d.trace.empty());
}

TEST_F(LcasTest, AllStandardPluginsPermit) {
  Decision d = eval({blacklist({"/C=IT/O=INFN/CN=Mallory"}), wallclock(86400),
                     voms(acl({{"permit", "/datagrid/*"}}))},
                    alice, {fresh(alice, {"/datagrid", "/datagrid/wp6"})});
  EXPECT_TRUE(d.allowed);
  ASSERT_EQ(d.trace.size(), 3u);
  for (const auto& t : d.trace) EXPECT_EQ(t.verdict, Effect::kPermit) << t.plugin;
  EXPECT_EQ(d.trace[0].plugin, "blacklist");
  EXPECT_EQ(d.trace[2].plugin, "voms");
}

TEST_F(LcasTest, ShortCircuitOnFirstDeny) {
  Decision d = eval({blacklist({alice.subject().render()}), wallclock(86400),
                     voms(acl({{"permit", "/datagrid/*"}}))},
                    alice, {fresh(alice, {"/datagrid"})});
  EXPECT_FALSE(d.allowed);
  ASSERT_EQ(d.trace.size(), 1u);
  EXPECT_EQ(d.trace[0].plugin, "blacklist");
  EXPECT_EQ(d.trace[0].verdict, Effect::kDeny);
}

TEST_F(LcasTest, BlacklistBannedPattern) {
  auto spec = blacklist({}, {"/datagrid/evil/*"});
  EXPECT_FALSE(eval({spec}, alice, {fresh(alice, {"/datagrid/evil/x"})}).allowed);
  EXPECT_FALSE(eval({spec}, alice, {fresh(alice, {"/datagrid/evil"})}).allowed);
  EXPECT_TRUE(eval({spec}, alice, {fresh(alice, {"/datagrid/good"})}).allowed);
  EXPECT_TRUE(eval({blacklist({})}, bob, {}).allowed);
}

TEST_F(LcasTest, WallclockBounds) {
  EXPECT_FALSE(eval({wallclock(86400)}, alice, {}, job(172800)).allowed);
  EXPECT_TRUE(eval({wallclock(86400)}, alice, {}, job(86400)).allowed);
  auto weekdays = TimeSchedule::weekly(TimeSchedule::working_days(), 0, 1440);
  EXPECT_FALSE(eval({wallclock(86400, weekdays)}, alice, {}, job(), kSaturday10).allowed);
  EXPECT_TRUE(eval({wallclock(86400, weekdays)}, alice, {}, job(), kWednesday10).allowed);
}

TEST_F(LcasTest, VomsAcl) {
  auto rules = acl({{"deny", "/datagrid/banned-watch"}, {"permit", "/datagrid/*"}});
  EXPECT_TRUE(eval({voms(rules)}, alice, {fresh(alice, {"/datagrid", "/datagrid/wp6"})}).allowed);
  EXPECT_FALSE(eval({voms(rules)}, alice, {fresh(alice, {"/datagrid", "/datagrid/banned-watch"})}).allowed);
  // No rule matches: default deny.
  EXPECT_FALSE(eval({voms(acl({{"permit", "/cms/*"}}))}, alice, {fresh(alice, {"/datagrid"})}).allowed);
}

TEST_F(LcasTest, VomsVerificationGate) {
  auto rules = acl({{"permit", "/datagrid/*"}});
  auto tampered = fresh(alice, {"/datagrid"});
  tampered.signature[3] ^= 0x40;
  EXPECT_FALSE(eval({voms(rules)}, alice, {tampered}).allowed);
  EXPECT_FALSE(eval({voms(rules, false)}, alice, {tampered}).allowed);

  auto expired = minter.mint(alice, {"/datagrid"}, Window{kT0 - 7200, kT0 - 1});
  EXPECT_FALSE(eval({voms(rules)}, alice, {expired}).allowed);

  auto stolen = fresh(alice, {"/datagrid"});
  EXPECT_FALSE(eval({voms(rules)}, bob, {stolen}).allowed);

  Minter rogue("datagrid");
  auto forged = rogue.mint(alice, {"/datagrid"}, Window{kT0 - 60, kT0 + 60});
  EXPECT_FALSE(eval({voms(rules)}, alice, {forged}).allowed);
}

TEST_F(LcasTest, VomsRequireAssertion) {
  auto rules = acl({{"permit", "/datagrid/*"}});
  EXPECT_FALSE(eval({voms(rules, true)}, alice, {}).allowed);
  EXPECT_TRUE(eval({voms(rules, false)}, alice, {}).allowed);
}

TEST_F(LcasTest, ProxyChainHolderBinding) {
  User proxy = pki.proxy(alice, kT0);
  EXPECT_TRUE(eval({voms(acl({{"permit", "/datagrid/*"}}))}, proxy, {fresh(alice, {"/datagrid"})}).allowed);
}

TEST_F(LcasTest, EmptyCredentialChainDenies) {
  Decision d = lcas_evaluate(SitePolicy({blacklist({})}, trusted), CredentialChain{}, {}, job(), kT0);
  EXPECT_FALSE(d.allowed);
}

TEST_F(LcasTest, PluginFaultDenies) {
  PluginRegistry reg = PluginRegistry::standard();
  reg.add("crash", [](const Document&) -> PluginFn {
    return [](const PluginInput&) -> PluginVerdict { throw std::runtime_error("boom"); };
  });
  SitePolicy policy({{"crash", Document::object()}, blacklist({})}, trusted, reg);
  Decision d = lcas_evaluate(policy, alice.chain, {}, job(), kT0);
  EXPECT_FALSE(d.allowed);
  ASSERT_EQ(d.trace.size(), 1u);
  EXPECT_NE(d.trace[0].reason.find("fault"), std::string::npos);
}

TEST_F(LcasTest, ConfigErrors) {
  auto code = [&](std::vector<PluginSpec> specs) {
    try {
      SitePolicy p(std::move(specs), trusted);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kInvalidArgument;
  };
  EXPECT_EQ(code({{"nosuch", Document::object()}}), ErrorCode::kConfigError);
  EXPECT_EQ(code({blacklist({}), blacklist({})}), ErrorCode::kConfigError);
  EXPECT_EQ(code({{"wallclock", Document{{"max_seconds", 1}, {"typo", 2}}}}), ErrorCode::kConfigError);
  EXPECT_EQ(code({{"voms", Document{{"acl", acl({{"allow", "/x"}})}}}}), ErrorCode::kConfigError);
}

TEST_F(LcasTest, PolicyDocumentAndTrace) {
  Document doc{{"plugins", Document::array({Document{{"name", "wallclock"}, {"config", {{"max_seconds", 10}}}}})},
               {"trusted_servers", trusted_servers_document(trusted)}};
  SitePolicy policy = SitePolicy::from_document(doc);
  Decision d = lcas_evaluate(policy, alice.chain, {}, job(11), kT0);
  EXPECT_FALSE(d.allowed);
  Document out = d.to_document();
  EXPECT_EQ(out["allowed"], false);
  EXPECT_EQ(out["trace"].size(), 1u);
  EXPECT_EQ(out["trace"][0]["verdict"], "deny");
}

TEST(JobSpec, RequiresPositiveWallclock) {
  EXPECT_THROW(JobSpec::from_document(Document{{"executable", "x"}, {"queue", "q"},
                                                {"requested_wallclock_seconds", 0}}),
               Error);
  JobSpec j = job(5);
  j.attributes["site"] = "cnaf";
  JobSpec back = JobSpec::from_document(canonical_parse(canonical_serialize(j.to_document())));
  EXPECT_EQ(back.attributes, j.attributes);
  EXPECT_EQ(back.requested_wallclock_seconds, 5u);
}

TEST(FqanAcl, FirstMatchWins) {
  FqanAcl a = FqanAcl::from_document(acl({{"deny", "/dg/x"}, {"permit", "/dg/*"}, {"deny", "/dg/y"}}));
  EXPECT_EQ(a.first_match(Fqan::parse("/dg/x")), Effect::kDeny);
  EXPECT_EQ(a.first_match(Fqan::parse("/dg/y")), Effect::kPermit);
  EXPECT_EQ(a.first_match(Fqan::parse("/cms")), std::nullopt);
}

// Blacklist placed before voms always wins, whatever the assertions say.
TEST_F(LcasTest, OverrideDominanceRandomized) {
  std::mt19937_64 rng(8);
  const std::vector<std::string> pool{"/datagrid", "/datagrid/wp6", "/datagrid/evil", "/datagrid/evil/x",
                                      "/datagrid/wp6/Role=admin"};
  for (int i = 0; i < 200; ++i) {
    std::vector<std::string> held;
    for (const auto& f : pool) {
      if (rng() % 2) held.push_back(f);
    }
    if (held.empty()) held.push_back("/datagrid");
    bool ban_subject = rng() % 2;
    auto spec = blacklist(ban_subject ? std::vector<std::string>{alice.subject().render()}
                                      : std::vector<std::string>{},
                          {"/datagrid/evil/*"});
    bool evil = std::any_of(held.begin(), held.end(), [](const std::string& f) {
      return f.rfind("/datagrid/evil", 0) == 0;
    });
    Decision d = eval({spec, voms(acl({{"permit", "/datagrid/*"}}))}, alice, {fresh(alice, held)});
    EXPECT_EQ(d.allowed, !(ban_subject || evil));
    EXPECT_EQ(d.trace.size(), (ban_subject || evil) ? 1u : 2u);
  }
}

TEST_F(LcasTest, AddingPluginsNeverUndoesADeny) {
  std::mt19937_64 rng(12);
  std::vector<PluginSpec> candidates{blacklist({"/C=IT/O=INFN/CN=Bob"}), wallclock(7200),
                                     voms(acl({{"permit", "/datagrid/wp6"}}), false)};
  for (int i = 0; i < 100; ++i) {
    std::vector<PluginSpec> prefix;
    for (const auto& c : candidates) {
      if (rng() % 2) prefix.push_back(c);
    }
    const User& who = rng() % 2 ? alice : bob;
    std::vector<AttributeAssertion> a;
    if (rng() % 2) a.push_back(fresh(who, {rng() % 2 ? "/datagrid/wp6" : "/datagrid"}));
    JobSpec j = job(rng() % 2 ? 3600 : 10000);
    Decision base = eval(prefix, who, a, j);
    bool conj = !base.trace.empty();
    for (const auto& t : base.trace) conj = conj && t.verdict == Effect::kPermit;
    EXPECT_EQ(conj, base.allowed);
    for (const auto& extra : candidates) {
      if (std::any_of(prefix.begin(), prefix.end(), [&](const PluginSpec& s) { return s.name == extra.name; })) {
        continue;
      }
      auto longer = prefix;
      longer.push_back(extra);
      if (!base.allowed && !prefix.empty()) EXPECT_FALSE(eval(longer, who, a, j).allowed);
    }
  }
}

// --- service authorization -------------------------------------------------------

class ServiceTest : public LcasTest {
 protected:
  ServiceTest() {
    policy.methods["write"] = {FqanPattern::parse("/datagrid/Role=admin")};
    policy.methods["read"] = {FqanPattern::parse("/datagrid/*")};
    policy.trusted_servers = trusted;
  }
  ServicePolicy policy;
};

TEST_F(ServiceTest, RoleRequirement) {
  auto admin = fresh(alice, {"/datagrid", "/datagrid/Role=admin"});
  EXPECT_TRUE(service_authorize(policy, alice.chain, {admin}, "write", kT0).permit);
  auto plain = fresh(alice, {"/datagrid"});
  EXPECT_FALSE(service_authorize(policy, alice.chain, {plain}, "write", kT0).permit);
  EXPECT_TRUE(service_authorize(policy, alice.chain, {plain}, "read", kT0).permit);
}

TEST_F(ServiceTest, GridmapFallback) {
  EXPECT_FALSE(service_authorize(policy, alice.chain, {}, "write", kT0).permit);
  policy.gridmap_fallback = GridMapfile::parse("\"/C=IT/O=INFN/CN=Alice\" alice\n");
  EXPECT_TRUE(service_authorize(policy, alice.chain, {}, "write", kT0).permit);
  EXPECT_FALSE(service_authorize(policy, bob.chain, {}, "write", kT0).permit);
}

TEST_F(ServiceTest, UnknownMethod) {
  try {
    service_authorize(policy, alice.chain, {}, "delete", kT0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownMethod);
  }
  policy.default_rule = std::vector<FqanPattern>{FqanPattern::parse("/datagrid")};
  EXPECT_TRUE(service_authorize(policy, alice.chain, {fresh(alice, {"/datagrid"})}, "delete", kT0).permit);
}

TEST_F(ServiceTest, UnverifiedAssertionIgnored) {
  auto admin = fresh(alice, {"/datagrid/Role=admin"});
  EXPECT_FALSE(service_authorize(policy, alice.chain, {admin}, "write", kT0 + kDay).permit);
}

}  // namespace
}  // namespace gridauth
