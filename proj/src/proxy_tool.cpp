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

#include <algorithm>
#include <sstream>

#include "gridauth/error.h"

namespace gridauth {

Bytes VomsExtensionPayload::encode() const {
  Document arr = Document::array();
  for (const auto& a : assertions) arr.push_back(a.to_document());
  Document doc{{"assertions", std::move(arr)}};
  if (user_supplied) {
    doc["user_supplied"] = Document{{"label", user_supplied->label},
                                    {"data", to_hex(user_supplied->data)}};
  }
  return to_bytes(canonical_serialize(doc));
}

VomsExtensionPayload VomsExtensionPayload::decode(std::span<const std::uint8_t> bytes) {
  try {
    Document doc = canonical_parse(to_string(bytes));
    VomsExtensionPayload out;
    for (const auto& a : get_array(doc, "assertions")) {
      out.assertions.push_back(AttributeAssertion::from_document(a));
    }
    std::size_t expected = 1;
    if (doc.contains("user_supplied")) {
      const Document& us = get_object(doc, "user_supplied");
      if (us.size() != 2) throw Error(ErrorCode::kParseError, "unexpected user_supplied fields");
      out.user_supplied = UserSupplied{get_string(us, "label"), get_hex(us, "data")};
      ++expected;
    }
    if (doc.size() != expected) throw Error(ErrorCode::kParseError, "unexpected payload fields");
    return out;
  } catch (const Error& e) {
    throw Error(ErrorCode::kMalformedPayload, std::string("VO extension: ") + e.what());
  }
}

const ProxyCredential& ProxyBundle::proxy() const {
  if (chain.proxies.empty()) throw Error(ErrorCode::kInvalidChain, "bundle holds no proxy");
  return chain.proxies.front();
}

Document ProxyBundle::to_document() const {
  return Document{{"type", "proxy-bundle"}, {"chain", chain.to_document()},
                  {"key", key.to_document()}};
}

ProxyBundle ProxyBundle::from_document(const Document& doc) {
  if (get_string(doc, "type") != "proxy-bundle" || doc.size() != 3) {
    throw Error(ErrorCode::kParseError, "not a proxy bundle");
  }
  ProxyBundle b;
  b.chain = CredentialChain::from_document(get_array(doc, "chain"));
  b.key = SecretKey::from_document(get_object(doc, "key"));
  if (b.chain.proxies.empty()) throw Error(ErrorCode::kParseError, "proxy bundle without a proxy");
  if (!(b.key.public_key() == b.chain.leaf_public_key())) {
    throw Error(ErrorCode::kParseError, "proxy bundle key does not match its proxy");
  }
  return b;
}

void ProxyBundle::save(const std::filesystem::path& path) const {
  write_document(path, to_document(), 0600);
}

ProxyBundle ProxyBundle::load(const std::filesystem::path& path) {
  return from_document(read_document(path));
}

ProxyInitResult proxy_init(const CredentialChain& chain, const SecretKey& key,
                           const ProxyInitOptions& options, const Transport& transport,
                           Timestamp now) {
  ValidationReport report = validate_chain_locally(chain, now);
  if (!report.accepted) {
    throw Error(ErrorCode::kInvalidChain, std::string(validation_rule_name(report.rule)) + ": " +
                                              report.detail);
  }
  ProxyInitResult result;
  if (!options.sources.empty()) {
    result.assertions = fetch_attributes(options.sources, chain, key, options.lifetime,
                                         options.trusted_servers, transport, now);
  }
  std::vector<Extension> extensions;
  if (!options.sources.empty() || options.user_supplied) {
    VomsExtensionPayload payload{result.assertions, options.user_supplied};
    extensions.push_back(Extension{kVomsExtensionLabel, false, payload.encode()});
  }
  ProxyResult proxy = create_proxy(chain, key, now, options.lifetime, std::move(extensions));
  result.bundle = ProxyBundle{std::move(proxy.chain), std::move(proxy.key)};
  result.warnings = std::move(proxy.warnings);
  return result;
}

std::optional<VomsExtensionPayload> extract_payload(const ProxyCredential& proxy) {
  const Extension* ext = proxy.find_extension(kVomsExtensionLabel);
  if (ext == nullptr) return std::nullopt;
  return VomsExtensionPayload::decode(ext->payload);
}

std::vector<AttributeAssertion> extract_assertions(const ProxyCredential& proxy) {
  auto payload = extract_payload(proxy);
  return payload ? payload->assertions : std::vector<AttributeAssertion>{};
}

namespace {

std::string assertion_status(const AttributeAssertion& a, const TrustedServers& trusted,
                             const CredentialChain& chain, Timestamp now) {
  auto key = trusted.find(a.vo);
  if (key == trusted.end()) return "unverified";
  if (!key->second.verify(canonical_serialize(a.unsigned_document()), a.signature)) {
    return "bad-signature";
  }
  const IdentityCredential& ee = chain.end_entity();
  if (ee.subject != a.holder || ee.serial != a.holder_serial) return "wrong-holder";
  if (now < a.validity.not_before) return "not-yet-valid";
  if (now >= a.validity.not_after) return "expired";
  return "valid";
}

}  // namespace

ProxyReport proxy_info(const ProxyBundle& bundle, const TrustedServers& trusted_servers,
                       Timestamp now) {
  const ProxyCredential& proxy = bundle.proxy();
  ProxyReport r;
  r.subject = proxy.subject.render();
  r.issuer = proxy.issuer.render();
  r.validity = proxy.validity;
  r.remaining = std::max<Timestamp>(0, proxy.validity.not_after - now);
  std::optional<VomsExtensionPayload> payload;
  try {
    payload = extract_payload(proxy);
  } catch (const Error& e) {
    r.malformed = e.what();
  }
  if (payload) {
    if (payload->user_supplied) r.user_supplied_label = payload->user_supplied->label;
    for (const auto& a : payload->assertions) {
      AssertionStatus s;
      s.vo = a.vo;
      for (const auto& f : a.fqans) s.fqans.push_back(f.render());
      s.validity = a.validity;
      s.status = assertion_status(a, trusted_servers, bundle.chain, now);
      r.assertions.push_back(std::move(s));
    }
    r.has_attributes = !r.assertions.empty();
  }
  return r;
}

Document ProxyReport::to_document() const {
  Document list = Document::array();
  for (const auto& a : assertions) {
    list.push_back(Document{{"vo", a.vo},
                            {"fqans", a.fqans},
                            {"not_before", a.validity.not_before},
                            {"not_after", a.validity.not_after},
                            {"status", a.status}});
  }
  Document doc{{"subject", subject},
               {"issuer", issuer},
               {"not_before", validity.not_before},
               {"not_after", validity.not_after},
               {"remaining", remaining},
               {"assertions", std::move(list)}};
  if (malformed) doc["malformed"] = *malformed;
  if (user_supplied_label) doc["user_supplied"] = *user_supplied_label;
  return doc;
}

std::string ProxyReport::to_text() const {
  std::ostringstream out;
  out << "subject   : " << subject << "\n"
      << "issuer    : " << issuer << "\n"
      << "timeleft  : " << remaining << " s\n";
  if (malformed) out << "attributes: malformed (" << *malformed << ")\n";
  if (user_supplied_label) out << "user data : " << *user_supplied_label << "\n";
  if (!has_attributes && !malformed) out << "no VO attributes\n";
  for (const auto& a : assertions) {
    out << "=== VO " << a.vo << " (" << a.status << ", valid " << a.validity.not_before
        << ".." << a.validity.not_after << ")\n";
    for (const auto& f : a.fqans) out << "attribute : " << f << "\n";
  }
  return out.str();
}

}  // namespace gridauth
