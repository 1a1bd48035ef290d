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

// Site authorization chain: an ordered list of named plugins, each of which
// permits or denies a job submission. The chain is an AND with short-circuit
// on the first deny; an empty chain denies. A coarse-grained per-method
// authorizer with grid-mapfile fallback lives here as well.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gridauth/authority.h"
#include "gridauth/credential.h"
#include "gridauth/fqan.h"
#include "gridauth/gridmap.h"

namespace gridauth {

struct JobSpec {
  std::string executable;
  std::uint64_t requested_wallclock_seconds = 0;
  std::string queue;
  std::map<std::string, std::string> attributes;

  Document to_document() const;
  /// Errors: kParseError, kInvalidArgument (zero wall-clock request).
  static JobSpec from_document(const Document& doc);
};

enum class Effect { kPermit, kDeny };
std::string_view effect_name(Effect effect);

struct AclRule {
  FqanPattern pattern;
  Effect effect = Effect::kDeny;
};

/// Ordered rules, first match wins, no match denies.
struct FqanAcl {
  std::vector<AclRule> rules;

  /// Effect of the first rule matching `fqan`, if any.
  std::optional<Effect> first_match(const Fqan& fqan) const;

  Document to_document() const;
  static FqanAcl from_document(const Document& doc);
};

struct PluginInput {
  const CredentialChain& chain;
  const std::vector<AttributeAssertion>& assertions;
  const JobSpec& job;
  const TrustedServers& trusted_servers;
  Timestamp now;
};

struct PluginVerdict {
  Effect verdict = Effect::kDeny;
  std::string reason;
};

using PluginFn = std::function<PluginVerdict(const PluginInput&)>;
/// Builds a plugin from its config document; throws kConfigError on bad
/// configuration.
using PluginFactory = std::function<PluginFn(const Document& config)>;

/// Name -> factory. Sites add their own plugins through add().
class PluginRegistry {
 public:
  /// Holds "blacklist", "wallclock" and "voms".
  static PluginRegistry standard();

  void add(const std::string& name, PluginFactory factory);
  const PluginFactory* find(const std::string& name) const;

 private:
  std::map<std::string, PluginFactory> factories_;
};

struct PluginSpec {
  std::string name;
  Document config;
};

/// Immutable once built; safe for concurrent evaluation.
class SitePolicy {
 public:
  /// Errors: kConfigError (unknown or duplicate plugin name, bad config).
  SitePolicy(std::vector<PluginSpec> plugins, TrustedServers trusted_servers,
             const PluginRegistry& registry = PluginRegistry::standard());

  /// {"plugins": [{"name", "config"}...], "trusted_servers": {...}} or
  /// "trusted_servers_file" resolved against `base_dir`.
  static SitePolicy from_document(const Document& doc, const std::filesystem::path& base_dir = {},
                                  const PluginRegistry& registry = PluginRegistry::standard());
  static SitePolicy load(const std::filesystem::path& path,
                         const PluginRegistry& registry = PluginRegistry::standard());

  const std::vector<PluginSpec>& plugins() const { return specs_; }
  const TrustedServers& trusted_servers() const { return trusted_servers_; }
  const std::vector<PluginFn>& compiled() const { return compiled_; }

 private:
  std::vector<PluginSpec> specs_;
  std::vector<PluginFn> compiled_;
  TrustedServers trusted_servers_;
};

struct TraceEntry {
  std::string plugin;
  Effect verdict = Effect::kDeny;
  std::string reason;
};

struct Decision {
  bool allowed = false;
  std::vector<TraceEntry> trace;

  Document to_document() const;
};

/// A plugin that throws is recorded as a deny with a "fault" reason.
Decision lcas_evaluate(const SitePolicy& policy, const CredentialChain& chain,
                       const std::vector<AttributeAssertion>& assertions, const JobSpec& job,
                       Timestamp now);

// Standard plugins, also usable directly.
PluginFn make_blacklist_plugin(const Document& config);
PluginFn make_wallclock_plugin(const Document& config);
PluginFn make_voms_plugin(const Document& config);

/// FQANs of the assertions that verify against the chain's end entity.
/// `all_verified` reports whether every presented assertion verified.
std::vector<Fqan> verified_fqans(const std::vector<AttributeAssertion>& assertions,
                                 const TrustedServers& trusted_servers,
                                 const CredentialChain& chain, Timestamp now,
                                 bool* all_verified = nullptr);

/// Coarse-grained role requirements per service method.
struct ServicePolicy {
  /// A method is satisfied by any verified FQAN matching any listed pattern.
  std::map<std::string, std::vector<FqanPattern>> methods;
  std::optional<std::vector<FqanPattern>> default_rule;
  std::optional<GridMapfile> gridmap_fallback;
  TrustedServers trusted_servers;
};

struct ServiceDecision {
  bool permit = false;
  std::string reason;
};

/// Errors: kUnknownMethod when neither the method nor a default rule exists.
ServiceDecision service_authorize(const ServicePolicy& policy, const CredentialChain& chain,
                                  const std::vector<AttributeAssertion>& assertions,
                                  const std::string& method, Timestamp now);

}  // namespace gridauth
