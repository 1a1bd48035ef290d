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

#include <algorithm>
#include <functional>

#include "gridauth/error.h"

namespace gridauth {
namespace {

constexpr std::string_view kProxyAttribute = "CN";
constexpr std::string_view kProxyValue = "proxy";

Document window_fields(Document doc, const Window& w) {
  doc["not_before"] = w.not_before;
  doc["not_after"] = w.not_after;
  return doc;
}

Window read_window(const Document& doc) {
  Window w{get_int(doc, "not_before"), get_int(doc, "not_after")};
  if (!(w.not_before < w.not_after)) {
    throw Error(ErrorCode::kParseError, "validity window must satisfy not_before < not_after");
  }
  return w;
}

void expect_type(const Document& doc, std::string_view type, std::size_t field_count) {
  if (get_string(doc, "type") != type) {
    throw Error(ErrorCode::kParseError, "expected a '" + std::string(type) + "' document");
  }
  if (doc.size() != field_count) {
    throw Error(ErrorCode::kParseError, "unexpected field set in '" + std::string(type) + "'");
  }
}

Document extension_document(const Extension& e) {
  return Document{{"label", e.label}, {"critical", e.critical}, {"payload", to_hex(e.payload)}};
}

Extension extension_from_document(const Document& doc) {
  if (doc.size() != 3) throw Error(ErrorCode::kParseError, "unexpected field set in extension");
  return Extension{get_string(doc, "label"), get_bool(doc, "critical"), get_hex(doc, "payload")};
}

// One position of a chain, viewed uniformly for validation.
struct ChainNode {
  bool is_proxy = false;
  const IdentityCredential* identity = nullptr;
  const ProxyCredential* proxy = nullptr;

  const SubjectName& subject() const { return is_proxy ? proxy->subject : identity->subject; }
  const SubjectName& issuer() const { return is_proxy ? proxy->issuer : identity->issuer; }
  const PublicKey& key() const { return is_proxy ? proxy->public_key : identity->public_key; }
  const Window& validity() const { return is_proxy ? proxy->validity : identity->validity; }
  const Bytes& signature() const { return is_proxy ? proxy->signature : identity->signature; }
  std::string signed_bytes() const {
    return canonical_serialize(is_proxy ? proxy->unsigned_document()
                                        : identity->unsigned_document());
  }
};

ValidationReport fail(ValidationRule rule, std::size_t index, std::string detail) {
  return ValidationReport{false, rule, index, std::move(detail)};
}

using AnchorLookup = std::function<const IdentityCredential*(const SubjectName&)>;

ValidationReport check_revocation(const IdentityCredential& cred, const PublicKey& issuer_key,
                                  std::span<const RevocationList> lists, Timestamp now,
                                  std::size_t index) {
  for (const auto& crl : lists) {
    if (crl.issuer != cred.issuer || crl.issued_at > now) continue;
    if (!crl.verify(issuer_key)) continue;
    if (crl.revoked_serials.count(cred.serial) != 0) {
      return fail(ValidationRule::kRevoked, index,
                  "serial " + std::to_string(cred.serial) + " revoked by " + crl.issuer.render());
    }
  }
  return ValidationReport::ok();
}

ValidationReport validate_impl(const CredentialChain& chain, const AnchorLookup* anchors,
                               std::span<const RevocationList> crls, Timestamp now,
                               const ValidationOptions& options) {
  if (chain.identities.empty()) {
    if (chain.proxies.empty()) return fail(ValidationRule::kEmptyChain, 0, "empty chain");
    return fail(ValidationRule::kMalformedChain, 0, "chain has no identity credential");
  }
  std::vector<ChainNode> nodes;
  nodes.reserve(chain.size());
  for (const auto& p : chain.proxies) nodes.push_back({true, nullptr, &p});
  for (const auto& c : chain.identities) nodes.push_back({false, &c, nullptr});

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const ChainNode& node = nodes[i];
    const bool last = i + 1 == nodes.size();

    if (node.validity().not_before > now) {
      return fail(ValidationRule::kNotYetValid, i, node.subject().render() + " not yet valid");
    }
    if (now >= node.validity().not_after) {
      return fail(ValidationRule::kExpired, i, node.subject().render() + " expired");
    }

    if (node.is_proxy) {
      for (const auto& ext : node.proxy->extensions) {
        if (ext.critical && options.understood_extensions.count(ext.label) == 0) {
          return fail(ValidationRule::kUnknownCriticalExtension, i,
                      "unknown critical extension '" + ext.label + "'");
        }
      }
    }

    const PublicKey* issuer_key = nullptr;
    if (!last) {
      const ChainNode& next = nodes[i + 1];
      if (node.issuer() != next.subject()) {
        return fail(ValidationRule::kBrokenLink, i,
                    "issuer " + node.issuer().render() + " != next subject " +
                        next.subject().render());
      }
      if (node.is_proxy) {
        const auto& comps = node.subject().components();
        if (!node.subject().extends_by_one(next.subject()) ||
            comps.back().attribute != kProxyAttribute || comps.back().value != kProxyValue) {
          return fail(ValidationRule::kProxySubject, i,
                      "proxy subject must be issuer subject + /CN=proxy");
        }
        if (!node.validity().within(next.validity())) {
          return fail(ValidationRule::kProxyWindow, i, "proxy window exceeds issuer window");
        }
      } else if (!next.identity->is_authority) {
        return fail(ValidationRule::kNotAnAuthority, i + 1,
                    next.subject().render() + " is not an authority");
      }
      issuer_key = &next.key();
    } else {
      const IdentityCredential& root = *node.identity;
      if (anchors != nullptr) {
        const IdentityCredential* anchor = (*anchors)(root.issuer);
        if (anchor == nullptr) {
          return fail(ValidationRule::kUntrustedRoot, i,
                      "no trust anchor for " + root.issuer.render());
        }
        if (root.self_signed() && !(root == *anchor)) {
          return fail(ValidationRule::kUntrustedRoot, i,
                      "self-signed root differs from the trust anchor");
        }
        if (!anchor->validity.contains(now)) {
          return fail(ValidationRule::kExpired, i,
                      "trust anchor " + anchor->subject.render() + " outside validity");
        }
        if (!anchor->is_authority) {
          return fail(ValidationRule::kNotAnAuthority, i, "trust anchor is not an authority");
        }
        issuer_key = &anchor->public_key;
      } else {
        if (!root.self_signed()) {
          return fail(ValidationRule::kUntrustedRoot, i, "chain does not end in a self-signed root");
        }
        issuer_key = &root.public_key;
      }
    }

    if (!issuer_key->verify(node.signed_bytes(), node.signature())) {
      return fail(ValidationRule::kBadSignature, i,
                  "signature of " + node.subject().render() + " does not verify");
    }

    if (!node.is_proxy && !(last && node.identity->self_signed())) {
      auto revoked = check_revocation(*node.identity, *issuer_key, crls, now, i);
      if (!revoked.accepted) return revoked;
    }
  }
  return ValidationReport::ok();
}

template <typename T>
bool verify_encoded(std::string_view encoded, const PublicKey& key) {
  try {
    T value = T::from_document(canonical_parse(encoded));
    return key.verify(canonical_serialize(value.unsigned_document()), value.signature);
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

// --- IdentityCredential -----------------------------------------------------

Document IdentityCredential::unsigned_document() const {
  Document doc{{"type", "identity"},
               {"subject", subject.render()},
               {"issuer", issuer.render()},
               {"public_key", public_key.to_document()},
               {"serial", serial},
               {"is_authority", is_authority}};
  return window_fields(std::move(doc), validity);
}

Document IdentityCredential::to_document() const {
  Document doc = unsigned_document();
  doc["signature"] = to_hex(signature);
  return doc;
}

IdentityCredential IdentityCredential::from_document(const Document& doc) {
  expect_type(doc, "identity", 9);
  IdentityCredential c;
  c.subject = SubjectName::parse(get_string(doc, "subject"));
  c.issuer = SubjectName::parse(get_string(doc, "issuer"));
  c.public_key = PublicKey::from_document(get_object(doc, "public_key"));
  c.serial = get_uint(doc, "serial");
  c.validity = read_window(doc);
  c.is_authority = get_bool(doc, "is_authority");
  c.signature = get_hex(doc, "signature");
  return c;
}

// --- ProxyCredential --------------------------------------------------------

const Extension* ProxyCredential::find_extension(std::string_view label) const {
  for (const auto& e : extensions) {
    if (e.label == label) return &e;
  }
  return nullptr;
}

Document ProxyCredential::unsigned_document() const {
  Document exts = Document::array();
  for (const auto& e : extensions) exts.push_back(extension_document(e));
  Document doc{{"type", "proxy"},
               {"subject", subject.render()},
               {"issuer", issuer.render()},
               {"public_key", public_key.to_document()},
               {"serial", serial},
               {"extensions", std::move(exts)}};
  return window_fields(std::move(doc), validity);
}

Document ProxyCredential::to_document() const {
  Document doc = unsigned_document();
  doc["signature"] = to_hex(signature);
  return doc;
}

ProxyCredential ProxyCredential::from_document(const Document& doc) {
  expect_type(doc, "proxy", 9);
  ProxyCredential p;
  p.subject = SubjectName::parse(get_string(doc, "subject"));
  p.issuer = SubjectName::parse(get_string(doc, "issuer"));
  p.public_key = PublicKey::from_document(get_object(doc, "public_key"));
  p.serial = get_uint(doc, "serial");
  p.validity = read_window(doc);
  for (const auto& e : get_array(doc, "extensions")) {
    p.extensions.push_back(extension_from_document(e));
  }
  p.signature = get_hex(doc, "signature");
  return p;
}

// --- CredentialChain --------------------------------------------------------

const IdentityCredential& CredentialChain::end_entity() const {
  if (identities.empty()) throw Error(ErrorCode::kInvalidChain, "chain has no identity credential");
  return identities.front();
}

const SubjectName& CredentialChain::leaf_subject() const {
  return proxies.empty() ? end_entity().subject : proxies.front().subject;
}

const PublicKey& CredentialChain::leaf_public_key() const {
  return proxies.empty() ? end_entity().public_key : proxies.front().public_key;
}

Document CredentialChain::to_document() const {
  Document arr = Document::array();
  for (const auto& p : proxies) arr.push_back(p.to_document());
  for (const auto& c : identities) arr.push_back(c.to_document());
  return arr;
}

CredentialChain CredentialChain::from_document(const Document& doc) {
  if (!doc.is_array()) throw Error(ErrorCode::kParseError, "chain must be an array");
  CredentialChain chain;
  for (const auto& item : doc) {
    std::string type = get_string(item, "type");
    if (type == "proxy") {
      if (!chain.identities.empty()) {
        throw Error(ErrorCode::kParseError, "proxy after identity credential in chain");
      }
      chain.proxies.push_back(ProxyCredential::from_document(item));
    } else if (type == "identity") {
      chain.identities.push_back(IdentityCredential::from_document(item));
    } else {
      throw Error(ErrorCode::kParseError, "unknown credential type '" + type + "'");
    }
  }
  return chain;
}

// --- RevocationList ---------------------------------------------------------

bool RevocationList::verify(const PublicKey& issuer_key) const {
  return issuer_key.verify(canonical_serialize(unsigned_document()), signature);
}

Document RevocationList::unsigned_document() const {
  Document serials = Document::array();
  for (auto s : revoked_serials) serials.push_back(s);
  return Document{{"type", "revocation-list"},
                  {"issuer", issuer.render()},
                  {"revoked", std::move(serials)},
                  {"issued_at", issued_at}};
}

Document RevocationList::to_document() const {
  Document doc = unsigned_document();
  doc["signature"] = to_hex(signature);
  return doc;
}

RevocationList RevocationList::from_document(const Document& doc) {
  expect_type(doc, "revocation-list", 5);
  RevocationList crl;
  crl.issuer = SubjectName::parse(get_string(doc, "issuer"));
  std::uint64_t previous = 0;
  bool first = true;
  for (const auto& s : get_array(doc, "revoked")) {
    if (!s.is_number_unsigned()) throw Error(ErrorCode::kParseError, "revoked serial not unsigned");
    auto serial = s.get<std::uint64_t>();
    if (!first && serial <= previous) {
      throw Error(ErrorCode::kParseError, "revoked serials must be strictly increasing");
    }
    first = false;
    previous = serial;
    crl.revoked_serials.insert(serial);
  }
  crl.issued_at = get_int(doc, "issued_at");
  crl.signature = get_hex(doc, "signature");
  return crl;
}

// --- CertificateAuthority ---------------------------------------------------

CertificateAuthority::CertificateAuthority(IdentityCredential credential, SecretKey key,
                                           std::uint64_t next_serial)
    : credential_(std::move(credential)), key_(std::move(key)), next_serial_(next_serial) {
  if (!(key_.public_key() == credential_.public_key)) {
    throw Error(ErrorCode::kInvalidArgument, "authority key does not match its credential");
  }
}

CertificateAuthority CertificateAuthority::create_root(const SubjectName& subject,
                                                       Window validity) {
  if (!(validity.not_before < validity.not_after)) {
    throw Error(ErrorCode::kWindowOutOfRange, "empty validity window");
  }
  SecretKey key = SecretKey::generate();
  IdentityCredential cred;
  cred.subject = subject;
  cred.issuer = subject;
  cred.public_key = key.public_key();
  cred.serial = 0;
  cred.validity = validity;
  cred.is_authority = true;
  cred.signature = key.sign(canonical_serialize(cred.unsigned_document()));
  return CertificateAuthority(std::move(cred), std::move(key), 1);
}

IdentityCredential CertificateAuthority::issue(const SubjectName& subject,
                                               const PublicKey& subject_key, Window validity,
                                               bool is_authority) {
  if (!credential_.is_authority) {
    throw Error(ErrorCode::kNotAnAuthority, credential_.subject.render() + " is not an authority");
  }
  if (!(validity.not_before < validity.not_after) || !validity.within(credential_.validity)) {
    throw Error(ErrorCode::kWindowOutOfRange, "requested window is outside the issuer's window");
  }
  IdentityCredential cred;
  cred.subject = subject;
  cred.issuer = credential_.subject;
  cred.public_key = subject_key;
  cred.serial = next_serial_++;
  cred.validity = validity;
  cred.is_authority = is_authority;
  cred.signature = key_.sign(canonical_serialize(cred.unsigned_document()));
  return cred;
}

RevocationList CertificateAuthority::issue_revocation_list(std::set<std::uint64_t> revoked,
                                                           Timestamp issued_at) const {
  RevocationList crl;
  crl.issuer = credential_.subject;
  crl.revoked_serials = std::move(revoked);
  crl.issued_at = issued_at;
  crl.signature = key_.sign(canonical_serialize(crl.unsigned_document()));
  return crl;
}

void CertificateAuthority::save(const std::filesystem::path& path) const {
  Document doc{{"type", "authority"},
               {"credential", credential_.to_document()},
               {"key", key_.to_document()},
               {"next_serial", next_serial_}};
  write_document(path, doc, 0600);
}

CertificateAuthority CertificateAuthority::load(const std::filesystem::path& path) {
  Document doc = read_document(path);
  expect_type(doc, "authority", 4);
  return CertificateAuthority(IdentityCredential::from_document(get_object(doc, "credential")),
                              SecretKey::from_document(get_object(doc, "key")),
                              get_uint(doc, "next_serial"));
}

IdentityCredential issue_identity(CertificateAuthority& issuer, const SubjectName& subject,
                                  const PublicKey& subject_key, Window validity,
                                  bool is_authority) {
  return issuer.issue(subject, subject_key, validity, is_authority);
}

// --- Proxies ----------------------------------------------------------------

ProxyResult create_proxy(const CredentialChain& chain, const SecretKey& leaf_key, Timestamp now,
                         Timestamp lifetime, std::vector<Extension> extensions) {
  ValidationReport report = validate_chain_locally(chain, now);
  if (!report.accepted) {
    throw Error(ErrorCode::kInvalidChain,
                "cannot derive a proxy: " + std::string(validation_rule_name(report.rule)) +
                    ": " + report.detail);
  }
  if (!(leaf_key.public_key() == chain.leaf_public_key())) {
    throw Error(ErrorCode::kInvalidChain, "private key does not match the chain leaf");
  }
  if (lifetime <= 0) throw Error(ErrorCode::kInvalidArgument, "proxy lifetime must be positive");

  const SubjectName& issuer_subject = chain.leaf_subject();
  const Window& issuer_window =
      chain.proxies.empty() ? chain.end_entity().validity : chain.proxies.front().validity;

  ProxyResult result;
  Timestamp not_after = now + lifetime;
  if (not_after > issuer_window.not_after) {
    not_after = issuer_window.not_after;
    result.warnings.push_back("requested lifetime " + std::to_string(lifetime) +
                              "s exceeds issuer validity; clamped to " +
                              std::to_string(not_after - now) + "s");
  }

  result.key = SecretKey::generate();
  ProxyCredential& proxy = result.proxy;
  proxy.subject = issuer_subject.with(std::string(kProxyAttribute), std::string(kProxyValue));
  proxy.issuer = issuer_subject;
  proxy.public_key = result.key.public_key();
  proxy.serial = random_u64() >> 1;
  proxy.validity = Window{now, not_after};
  proxy.extensions = std::move(extensions);
  proxy.signature = leaf_key.sign(canonical_serialize(proxy.unsigned_document()));

  result.chain = chain;
  result.chain.proxies.insert(result.chain.proxies.begin(), proxy);
  return result;
}

// --- Trust store / validation -----------------------------------------------

TrustStore TrustStore::load_directory(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  TrustStore store;
  for (const auto& f : files) store.add(IdentityCredential::from_document(read_document(f)));
  return store;
}

const IdentityCredential* TrustStore::find(const SubjectName& subject) const {
  for (const auto& a : anchors_) {
    if (a.subject == subject) return &a;
  }
  return nullptr;
}

std::string_view validation_rule_name(ValidationRule rule) {
  switch (rule) {
    case ValidationRule::kOk: return "Ok";
    case ValidationRule::kEmptyChain: return "EmptyChain";
    case ValidationRule::kMalformedChain: return "MalformedChain";
    case ValidationRule::kBrokenLink: return "BrokenLink";
    case ValidationRule::kBadSignature: return "BadSignature";
    case ValidationRule::kNotYetValid: return "NotYetValid";
    case ValidationRule::kExpired: return "Expired";
    case ValidationRule::kUntrustedRoot: return "UntrustedRoot";
    case ValidationRule::kRevoked: return "Revoked";
    case ValidationRule::kNotAnAuthority: return "NotAnAuthority";
    case ValidationRule::kProxySubject: return "ProxySubject";
    case ValidationRule::kProxyWindow: return "ProxyWindow";
    case ValidationRule::kUnknownCriticalExtension: return "UnknownCriticalExtension";
  }
  return "Unknown";
}

Document ValidationReport::to_document() const {
  return Document{{"accepted", accepted},
                  {"rule", std::string(validation_rule_name(rule))},
                  {"index", static_cast<std::uint64_t>(index)},
                  {"detail", detail}};
}

ValidationReport validate_chain(const CredentialChain& chain, const TrustStore& anchors,
                                std::span<const RevocationList> revocation_lists, Timestamp now,
                                const ValidationOptions& options) {
  AnchorLookup lookup = [&anchors](const SubjectName& s) { return anchors.find(s); };
  return validate_impl(chain, &lookup, revocation_lists, now, options);
}

ValidationReport validate_chain_locally(const CredentialChain& chain, Timestamp now) {
  ValidationOptions permissive;
  // Locally the holder only checks its own material; extension semantics are
  // the relying party's business.
  for (const auto& p : chain.proxies) {
    for (const auto& e : p.extensions) permissive.understood_extensions.insert(e.label);
  }
  return validate_impl(chain, nullptr, {}, now, permissive);
}

bool verify_encoded_identity(std::string_view encoded, const PublicKey& key) {
  return verify_encoded<IdentityCredential>(encoded, key);
}

bool verify_encoded_proxy(std::string_view encoded, const PublicKey& key) {
  return verify_encoded<ProxyCredential>(encoded, key);
}

bool verify_encoded_revocation_list(std::string_view encoded, const PublicKey& key) {
  return verify_encoded<RevocationList>(encoded, key);
}

void save_chain(const std::filesystem::path& path, const CredentialChain& chain) {
  write_document(path, chain.to_document());
}

CredentialChain load_chain(const std::filesystem::path& path) {
  return CredentialChain::from_document(read_document(path));
}

std::vector<RevocationList> load_revocation_lists(std::span<const std::filesystem::path> paths) {
  std::vector<RevocationList> out;
  for (const auto& p : paths) out.push_back(RevocationList::from_document(read_document(p)));
  return out;
}

}  // namespace gridauth
