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


#include "gridauth/gatekeeper.h"

#include "gridauth/error.h"

namespace gridauth {
namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() ? base / path : path;
}

GateResponse deny(GateResponse r, std::string stage, std::string detail) {
  r.allowed = false;
  r.stage = std::move(stage);
  r.detail = std::move(detail);
  r.local.reset();
  return r;
}

}  // namespace

GateConfig GateConfig::load(const std::filesystem::path& path) {
  try {
    const Document doc = read_document(path);
    const auto base = path.parent_path();
    std::vector<std::filesystem::path> crl_paths;
    if (doc.contains("revocation_lists")) {
      for (const auto& p : get_array(doc, "revocation_lists")) {
        crl_paths.push_back(resolve(base, p.get<std::string>()));
      }
    }
    std::optional<GridMapfile> gridmap;
    if (doc.contains("gridmapfile")) {
      gridmap = GridMapfile::load(resolve(base, get_string(doc, "gridmapfile")));
    }
    return GateConfig{TrustStore::load_directory(resolve(base, get_string(doc, "trust_anchors"))),
                      load_revocation_lists(crl_paths),
                      SitePolicy::load(resolve(base, get_string(doc, "site_policy"))),
                      MappingPolicy::load(resolve(base, get_string(doc, "mapping_policy"))),
                      resolve(base, get_string(doc, "leasedir")),
                      get_bool(doc, "voms_aware"),
                      std::move(gridmap)};
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfigError) throw;
    throw Error(ErrorCode::kConfigError, "gatekeeper config: " + std::string(e.what()));
  }
}

Document GateRequest::to_document() const {
  return Document{{"proxy_bundle", to_hex(to_bytes(proxy_bundle))}, {"job", job.to_document()}};
}

GateRequest GateRequest::from_document(const Document& doc) {
  if (doc.size() != 2) throw Error(ErrorCode::kParseError, "unexpected gate request fields");
  return GateRequest{to_string(get_hex(doc, "proxy_bundle")),
                     JobSpec::from_document(get_object(doc, "job"))};
}

Document GateResponse::to_document() const {
  Document doc{{"allowed", allowed},
               {"stage", stage},
               {"detail", detail},
               {"validation", validation.to_document()},
               {"decision", decision.to_document()}};
  if (local) doc["local"] = local->to_document();
  return doc;
}

GateResponse gate_handle(const GateConfig& config, const GateRequest& request, Timestamp now) {
  ProxyBundle bundle;
  try {
    bundle = ProxyBundle::from_document(canonical_parse(request.proxy_bundle));
  } catch (const Error& e) {
    throw Error(ErrorCode::kMalformedRequest, std::string("proxy bundle: ") + e.what());
  }
  const CredentialChain& chain = bundle.chain;

  GateResponse r;
  r.validation = validate_chain(chain, config.trust_anchors, config.revocation_lists, now);
  if (!r.validation.accepted) {
    return deny(std::move(r), "validation",
                std::string(validation_rule_name(r.validation.rule)) + ": " + r.validation.detail);
  }
  const SubjectName& subject = chain.end_entity().subject;

  std::vector<AttributeAssertion> assertions;
  if (config.voms_aware) {
    try {
      assertions = extract_assertions(bundle.proxy());
    } catch (const Error& e) {
      return deny(std::move(r), "attributes", e.what());
    }
  }
  std::vector<Fqan> fqans =
      verified_fqans(assertions, config.site_policy.trusted_servers(), chain, now);

  const GridMapEntry* legacy = nullptr;
  if (fqans.empty() && config.gridmapfile) {
    legacy = config.gridmapfile->find(subject);
    if (legacy == nullptr) {
      return deny(std::move(r), "gridmap", subject.render() + " is not in the grid-mapfile");
    }
  }

  r.decision = lcas_evaluate(config.site_policy, chain, assertions, request.job, now);
  if (!r.decision.allowed) {
    std::string reason = r.decision.trace.empty() ? "empty authorization chain"
                                                  : r.decision.trace.back().plugin + ": " +
                                                        r.decision.trace.back().reason;
    return deny(std::move(r), "authorization", reason);
  }

  try {
    LeaseLedger ledger(config.leasedir);
    r.local = legacy ? lcmaps_map_target(config.mapping_policy, ledger, subject, legacy->target,
                                         fqans, now)
                     : lcmaps_map(config.mapping_policy, ledger, subject, fqans, now);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNoMappingRule && e.code() != ErrorCode::kPoolExhausted) throw;
    return deny(std::move(r), "mapping", std::string(error_code_name(e.code())) + ": " + e.what());
  }
  r.allowed = true;
  r.stage = "granted";
  return r;
}

HttpResponse gate_handle_http(const GateConfig& config, const std::string& body, Timestamp now) {
  try {
    GateRequest request;
    try {
      request = GateRequest::from_document(canonical_parse(body));
    } catch (const Error& e) {
      throw Error(ErrorCode::kMalformedRequest, e.what());
    }
    return HttpResponse{200, canonical_serialize(gate_handle(config, request, now).to_document())};
  } catch (const Error& e) {
    return error_response(e);
  }
}

}  // namespace gridauth
