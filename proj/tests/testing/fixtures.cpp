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


#include "testing/fixtures.h"

#include <stdlib.h>

#include "gridauth/error.h"

namespace gridauth::testing {

TempDir::TempDir() {
  std::string pattern = (std::filesystem::temp_directory_path() / "gridauth-test-XXXXXX").string();
  if (::mkdtemp(pattern.data()) == nullptr) {
    throw Error(ErrorCode::kIoError, "mkdtemp failed");
  }
  path_ = pattern;
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

TestPki::TestPki(const std::string& ca_subject)
    : ca_(CertificateAuthority::create_root(SubjectName::parse(ca_subject),
                                            Window{kT0 - kYear, kT0 + 10 * kYear})) {
  anchors_.add(ca_.credential());
}

User TestPki::issue(const std::string& subject) {
  return issue(subject, Window{kT0 - 30 * kDay, kT0 + kYear});
}

User TestPki::issue(const std::string& subject, Window window) {
  SecretKey key = SecretKey::generate();
  IdentityCredential cred = ca_.issue(SubjectName::parse(subject), key.public_key(), window, false);
  User u;
  u.chain.identities = {cred, ca_.credential()};
  u.key = std::move(key);
  return u;
}

User TestPki::proxy(const User& user, Timestamp now, Timestamp lifetime,
                    std::vector<Extension> extensions) {
  ProxyResult r = create_proxy(user.chain, user.key, now, lifetime, std::move(extensions));
  return User{std::move(r.chain), std::move(r.key)};
}

RevocationList TestPki::revoke(std::set<std::uint64_t> serials, Timestamp issued_at) {
  return ca_.issue_revocation_list(std::move(serials), issued_at);
}

TestGrid::TestGrid() = default;

VoSite& TestGrid::add_vo(const std::string& vo, const std::string& endpoint, Timestamp now) {
  auto site = std::make_unique<VoSite>();
  site->vo = vo;
  site->endpoint = endpoint;
  site->store = std::make_unique<VoStore>(
      VoRegistry::create(vo, SubjectName::parse(kVoOwner), now));
  User server = pki_.issue("/C=IT/O=INFN/CN=voms." + vo + ".example.org");
  ServerPolicy policy;
  policy.vo = vo;
  policy.trust_anchors = pki_.anchors();
  site->server = std::make_unique<AttributeServer>(
      *site->store, ServerIdentity{server.chain.end_entity(), server.key}, policy);
  site->admin = std::make_unique<AdminService>(*site->store, pki_.anchors(),
                                               std::vector<RevocationList>{});
  trusted_[vo] = server.chain.end_entity().public_key;
  AttributeServer* srv = site->server.get();
  network_.serve(endpoint, kAttributesPath,
                 [this, srv](const std::string& body) { return srv->handle_http(body, clock); });
  site->admin->install(network_, endpoint, [this] { return clock; });
  sites_.push_back(std::move(site));
  return *sites_.back();
}

VoSite& TestGrid::site(const std::string& vo) {
  for (auto& s : sites_) {
    if (s->vo == vo) return *s;
  }
  throw Error(ErrorCode::kInvalidArgument, "no VO " + vo);
}

GroupId G(const VoRegistry& r, const std::string& path) { return r.require_group(path); }

std::vector<std::string> rendered(const std::vector<Fqan>& fqans) {
  std::vector<std::string> out;
  for (const auto& f : fqans) out.push_back(f.render());
  return out;
}

}  // namespace gridauth::testing
