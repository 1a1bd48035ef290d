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

// Job-submission gatekeeper:
//
//   proxy bundle ─► validate_chain ─► extract assertions ─► grid-mapfile
//                   (trust anchors,    (VO-aware mode only)  (legacy path)
//                    revocation)
//               ─► lcas_evaluate ─► lcmaps_map ─► LocalCredential
//
// Any stage failure ends the pipeline with allowed=false and the stage name.
// The legacy path applies whenever no verified assertion is available, which
// is always the case in VO-unaware mode.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gridauth/credential.h"
#include "gridauth/gridmap.h"
#include "gridauth/lcas.h"
#include "gridauth/lcmaps.h"
#include "gridauth/proxy_tool.h"
#include "gridauth/transport.h"

namespace gridauth {

struct GateConfig {
  TrustStore trust_anchors;
  std::vector<RevocationList> revocation_lists;
  SitePolicy site_policy;
  MappingPolicy mapping_policy;
  std::filesystem::path leasedir;
  bool voms_aware = true;
  std::optional<GridMapfile> gridmapfile;

  /// Config document naming the sub-policy files (relative paths resolve
  /// against the config file's directory):
  ///   {"trust_anchors": DIR, "revocation_lists": [FILE...],
  ///    "site_policy": FILE, "mapping_policy": FILE, "leasedir": DIR,
  ///    "voms_aware": BOOL, "gridmapfile": FILE (optional)}
  /// Errors: kConfigError.
  static GateConfig load(const std::filesystem::path& path);
};

struct GateRequest {
  std::string proxy_bundle;
  JobSpec job;

  Document to_document() const;
  static GateRequest from_document(const Document& doc);
};

struct GateResponse {
  bool allowed = false;
  /// "validation", "attributes", "gridmap", "authorization", "mapping", or
  /// "granted" when allowed.
  std::string stage;
  std::string detail;
  std::optional<LocalCredential> local;
  ValidationReport validation;
  Decision decision;

  Document to_document() const;
};

/// Errors: kMalformedRequest (unparseable bundle).
GateResponse gate_handle(const GateConfig& config, const GateRequest& request, Timestamp now);

inline constexpr const char* kSubmitPath = "/submit";

/// `/submit` body handler: GateResponse document, or an error document for
/// malformed requests.
HttpResponse gate_handle_http(const GateConfig& config, const std::string& body, Timestamp now);

}  // namespace gridauth
