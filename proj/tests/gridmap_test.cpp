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


#include "gridauth/gridmap.h"

#include <gtest/gtest.h>

#include <random>

#include "gridauth/error.h"
#include "testing/fixtures.h"

namespace gridauth {
namespace {

using testing::kT0;

SubjectName S(const std::string& s) { return SubjectName::parse(s); }

template <typename F>
Error error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "no error thrown";
  return Error(ErrorCode::kInvalidArgument, "none");
}

TEST(GridMapfile, EmitSortedQuotedLf) {
  GridMapfile g;
  EXPECT_TRUE(g.add(S("/O=Grid/CN=zed"), ".dteam"));
  EXPECT_TRUE(g.add(S("/C=IT/O=INFN/CN=Mario Rossi"), "mrossi"));
  EXPECT_FALSE(g.add(S("/O=Grid/CN=zed"), "other"));
  EXPECT_EQ(g.emit(), "\"/C=IT/O=INFN/CN=Mario Rossi\" mrossi\n\"/O=Grid/CN=zed\" .dteam\n");
  EXPECT_EQ(g.find(S("/O=Grid/CN=zed"))->target, ".dteam");
  EXPECT_TRUE(g.find(S("/O=Grid/CN=zed"))->is_pool());
  EXPECT_EQ(g.find(S("/O=Grid/CN=zed"))->pool(), "dteam");
  EXPECT_TRUE(g.remove(S("/O=Grid/CN=zed")));
  EXPECT_FALSE(g.remove(S("/O=Grid/CN=zed")));
  EXPECT_EQ(GridMapfile().emit(), "");
}

TEST(GridMapfile, ParseAcceptsCommentsBlankAndUnquoted) {
  GridMapfile g = GridMapfile::parse(
      "# site grid-mapfile\n"
      "\n"
      "\"/O=Grid/CN=b c\" .pool\n"
      "/O=Grid/CN=a   alocal\n");
  ASSERT_EQ(g.entries().size(), 2u);
  EXPECT_EQ(g.entries()[0].subject.render(), "/O=Grid/CN=a");
  EXPECT_EQ(g.entries()[1].target, ".pool");
}

TEST(GridMapfile, ParseRejections) {
  for (const char* bad : {"\"/O=Grid/CN=a\"\n", "\"/O=Grid/CN=a\" bad target\n", "\"/O=Grid/CN=a b\n",
                          "\"not a subject\" x\n", "\"/O=Grid/CN=a\" x\n\"/O=Grid/CN=a\" y\n",
                          "\"/O=Grid/CN=a\" ..x\n"}) {
    Error e = error_of([&] { GridMapfile::parse(bad); });
    EXPECT_EQ(e.code(), ErrorCode::kMalformedConfig) << bad;
  }
  Error e = error_of([] { GridMapfile::parse("# c\n\"/O=Grid/CN=a\" x\n\"/O=Grid/CN=a\" y\n"); });
  EXPECT_NE(std::string(e.what()).find("3"), std::string::npos);
}

TEST(GridMapfile, ParseEmitRoundTrip) {
  std::mt19937_64 rng(17);
  const std::string letters = "abcXYZ 019.-";
  for (int trial = 0; trial < 200; ++trial) {
    GridMapfile g;
    int n = static_cast<int>(rng() % 8);
    for (int i = 0; i < n; ++i) {
      std::string cn;
      for (int k = 0; k < 1 + static_cast<int>(rng() % 8); ++k) cn += letters[rng() % letters.size()];
      while (!cn.empty() && cn.back() == ' ') cn.pop_back();
      while (!cn.empty() && cn.front() == ' ') cn.erase(cn.begin());
      if (cn.empty()) continue;
      std::string target = (rng() % 2 ? "." : "") + std::string("acct") + std::to_string(rng() % 50);
      g.add(S("/O=Grid/CN=" + cn), target);
    }
    const std::string text = g.emit();
    GridMapfile back = GridMapfile::parse(text);
    ASSERT_EQ(back, g) << text;
    ASSERT_EQ(back.emit(), text);
  }
}

TEST(GridMapTarget, Grammar) {
  EXPECT_TRUE(is_valid_gridmap_target("dteam001"));
  EXPECT_TRUE(is_valid_gridmap_target(".dteam"));
  EXPECT_FALSE(is_valid_gridmap_target(""));
  EXPECT_FALSE(is_valid_gridmap_target("."));
  EXPECT_FALSE(is_valid_gridmap_target("a b"));
  EXPECT_FALSE(is_valid_gridmap_target("a\"b"));
}

// --- mkgridmap ---------------------------------------------------------------------

class FakeVo {
 public:
  void add(const std::string& endpoint, const std::string& fqan, std::vector<std::string> users) {
    auto& list = lists_[{endpoint, fqan}];
    for (auto& u : users) list.push_back(S(u));
  }
  UserListFetcher fetcher() {
    return [this](const std::string& endpoint, const Fqan& fqan, Timestamp) {
      ++calls;
      if (endpoint == "down:1") throw Error(ErrorCode::kTransportError, "connection refused");
      auto it = lists_.find({endpoint, fqan.render()});
      return it == lists_.end() ? std::vector<SubjectName>{} : it->second;
    };
  }
  int calls = 0;

 private:
  std::map<std::pair<std::string, std::string>, std::vector<SubjectName>> lists_;
};

class MkgridmapTest : public ::testing::Test {
 protected:
  MkgridmapTest() {
    vo.add("voms.dg:15000", "/datagrid", {"/O=Grid/CN=carol", "/O=Grid/CN=alice", "/O=Grid/CN=bob"});
    vo.add("voms.dg:15000", "/datagrid/wp6", {"/O=Grid/CN=alice"});
  }
  std::string run(const std::string& config) {
    return mkgridmap_generate(MkgridmapConfig::parse(config), vo.fetcher(), kT0).emit();
  }
  FakeVo vo;
};

TEST_F(MkgridmapTest, GroupDirective) {
  EXPECT_EQ(run("group voms.dg:15000 datagrid .dteam\n"),
            "\"/O=Grid/CN=alice\" .dteam\n\"/O=Grid/CN=bob\" .dteam\n\"/O=Grid/CN=carol\" .dteam\n");
}

TEST_F(MkgridmapTest, DenyRemovesSubject) {
  EXPECT_EQ(run("group voms.dg:15000 /datagrid .dteam\ndeny \"/O=Grid/CN=bob\"\n"),
            "\"/O=Grid/CN=alice\" .dteam\n\"/O=Grid/CN=carol\" .dteam\n");
}

TEST_F(MkgridmapTest, DenyDominatesRegardlessOfPosition) {
  std::string out = run(
      "deny \"/O=Grid/CN=alice\"\n"
      "group voms.dg:15000 /datagrid/wp6 wp6acct\n"
      "auth \"/O=Grid/CN=alice\" alice\n");
  EXPECT_EQ(out, "");
}

TEST_F(MkgridmapTest, AuthAddsLocalUser) {
  std::string out = run(
      "# local users\n"
      "group voms.dg:15000 /datagrid/wp6 wp6acct\n"
      "auth \"/C=IT/O=INFN/CN=Mario Rossi\" mrossi\n");
  EXPECT_EQ(out, "\"/C=IT/O=INFN/CN=Mario Rossi\" mrossi\n\"/O=Grid/CN=alice\" wp6acct\n");
}

TEST_F(MkgridmapTest, FirstDirectiveWins) {
  std::string out = run(
      "group voms.dg:15000 /datagrid/wp6 wp6acct\n"
      "group voms.dg:15000 /datagrid .dteam\n");
  EXPECT_NE(out.find("\"/O=Grid/CN=alice\" wp6acct\n"), std::string::npos);
  EXPECT_NE(out.find("\"/O=Grid/CN=bob\" .dteam\n"), std::string::npos);
}

TEST_F(MkgridmapTest, ByteDeterministic) {
  const std::string cfg = "group voms.dg:15000 /datagrid .dteam\nauth \"/O=Grid/CN=z\" z\n";
  EXPECT_EQ(run(cfg), run(cfg));
}

TEST_F(MkgridmapTest, UnreachableEndpointNamed) {
  Error e = error_of([&] { run("group voms.dg:15000 /datagrid .dteam\ngroup down:1 /cms .cms\n"); });
  EXPECT_EQ(e.code(), ErrorCode::kEndpointUnreachable);
  EXPECT_NE(std::string(e.what()).find("down:1"), std::string::npos);
}

TEST(MkgridmapConfig, Malformed) {
  for (const char* bad : {"group a:1 /dg\n", "auth \"/O=Grid/CN=a\"\n", "deny\n", "frobnicate x\n",
                          "group a:1 /dg bad target\n", "auth \"/O=Grid/CN=a x\n", "group a:1 not/fqan x\n"}) {
    Error e = error_of([&] { MkgridmapConfig::parse(bad); });
    EXPECT_EQ(e.code(), ErrorCode::kMalformedConfig) << bad;
  }
}

TEST(MkgridmapConfig, ParsesDirectives) {
  auto cfg = MkgridmapConfig::parse(
      "  # comment\n"
      "group voms.dg:15000 datagrid .dteam\n"
      "auth \"/O=Grid/CN=x y\" xy\n"
      "deny /O=Grid/CN=bad\n");
  ASSERT_EQ(cfg.directives.size(), 3u);
  EXPECT_EQ(cfg.directives[0].selector->render(), "/datagrid");
  EXPECT_EQ(cfg.directives[0].line, 2);
  EXPECT_EQ(cfg.directives[1].subject.render(), "/O=Grid/CN=x y");
  EXPECT_EQ(cfg.directives[2].kind, MkgridmapDirective::Kind::kDeny);
}

}  // namespace
}  // namespace gridauth
