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

#include <algorithm>
#include <set>

#include "gridauth/error.h"
#include "gridauth/schedule.h"

namespace gridauth {
namespace {

Error config_error(const std::string& plugin, const std::string& message) {
  return Error(ErrorCode::kConfigError, plugin + ": " + message);
}

// Runs `f` and turns any parse failure into a configuration error.
template <typename F>
auto parse_config(const std::string& plugin, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw config_error(plugin, e.what());
  }
}

void require_keys(const std::string& plugin, const Document& config,
                  std::initializer_list<const char*> allowed) {
  if (!config.is_object()) throw config_error(plugin, "config must be an object");
  for (const auto& [key, value] : config.items()) {
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* a) { return key == a; }) == allowed.end()) {
      throw config_error(plugin, "unknown config key '" + key + "'");
    }
  }
}

}  // namespace

// --- jobs and ACLs ----------------------------------------------------------

Document JobSpec::to_document() const {
  return Document{{"executable", executable},
                  {"requested_wallclock_seconds", requested_wallclock_seconds},
                  {"queue", queue},
                  {"attributes", attributes}};
}

JobSpec JobSpec::from_document(const Document& doc) {
  JobSpec job;
  job.executable = get_string(doc, "executable");
  job.requested_wallclock_seconds = get_uint(doc, "requested_wallclock_seconds");
  job.queue = get_string(doc, "queue");
  std::size_t expected = 3;
  if (doc.contains("attributes")) {
    for (const auto& [k, v] : get_object(doc, "attributes").items()) {
      if (!v.is_string()) throw Error(ErrorCode::kParseError, "job attribute values are strings");
      job.attributes[k] = v.get<std::string>();
    }
    ++expected;
  }
  if (doc.size() != expected) throw Error(ErrorCode::kParseError, "unexpected job fields");
  if (job.requested_wallclock_seconds == 0) {
    throw Error(ErrorCode::kInvalidArgument, "requested_wallclock_seconds must be positive");
  }
  return job;
}

std::string_view effect_name(Effect effect) {
  return effect == Effect::kPermit ? "permit" : "deny";
}

std::optional<Effect> FqanAcl::first_match(const Fqan& fqan) const {
  for (const auto& rule : rules) {
    if (rule.pattern.matches(fqan)) return rule.effect;
  }
  return std::nullopt;
}

Document FqanAcl::to_document() const {
  Document arr = Document::array();
  for (const auto& r : rules) {
    arr.push_back(Document{{"effect", effect_name(r.effect)}, {"pattern", r.pattern.render()}});
  }
  return arr;
}

FqanAcl FqanAcl::from_document(const Document& doc) {
  if (!doc.is_array()) throw Error(ErrorCode::kParseError, "ACL must be an array");
  FqanAcl acl;
  for (const auto& r : doc) {
    if (!r.is_object() || r.size() != 2) throw Error(ErrorCode::kParseError, "bad ACL rule");
    std::string effect = get_string(r, "effect");
    if (effect != "permit" && effect != "deny") {
      throw Error(ErrorCode::kParseError, "ACL effect must be permit or deny");
    }
    acl.rules.push_back(AclRule{FqanPattern::parse(get_string(r, "pattern")),
                                effect == "permit" ? Effect::kPermit : Effect::kDeny});
  }
  return acl;
}

// --- plugins ----------------------------------------------------------------

std::vector<Fqan> verified_fqans(const std::vector<AttributeAssertion>& assertions,
                                 const TrustedServers& trusted_servers,
                                 const CredentialChain& chain, Timestamp now,
                                 bool* all_verified) {
  std::vector<Fqan> out;
  bool all = true;
  for (const auto& a : assertions) {
    if (verify_assertion(a, trusted_servers, chain, now)) {
      out.insert(out.end(), a.fqans.begin(), a.fqans.end());
    } else {
      all = false;
    }
  }
  if (all_verified) *all_verified = all;
  return out;
}

PluginFn make_blacklist_plugin(const Document& config) {
  require_keys("blacklist", config, {"banned_subjects", "banned_fqan_patterns"});
  auto [subjects, patterns] = parse_config("blacklist", [&] {
    std::set<SubjectName> subjects;
    std::vector<FqanPattern> patterns;
    if (config.contains("banned_subjects")) {
      for (const auto& s : get_array(config, "banned_subjects")) {
        subjects.insert(SubjectName::parse(s.get<std::string>()));
      }
    }
    if (config.contains("banned_fqan_patterns")) {
      for (const auto& p : get_array(config, "banned_fqan_patterns")) {
        patterns.push_back(FqanPattern::parse(p.get<std::string>()));
      }
    }
    return std::pair{subjects, patterns};
  });
  return [subjects = std::move(subjects), patterns = std::move(patterns)](const PluginInput& in) {
    const SubjectName& who = in.chain.end_entity().subject;
    if (subjects.count(who)) return PluginVerdict{Effect::kDeny, "banned subject " + who.render()};
    for (const auto& a : in.assertions) {
      for (const auto& f : a.fqans) {
        for (const auto& p : patterns) {
          if (p.matches(f)) {
            return PluginVerdict{Effect::kDeny,
                                 "FQAN " + f.render() + " matches banned " + p.render()};
          }
        }
      }
    }
    return PluginVerdict{Effect::kPermit, "not listed"};
  };
}

PluginFn make_wallclock_plugin(const Document& config) {
  require_keys("wallclock", config, {"max_seconds", "allowed_window"});
  auto [max_seconds, window] = parse_config("wallclock", [&] {
    std::uint64_t max_seconds = get_uint(config, "max_seconds");
    std::optional<TimeSchedule> window;
    if (config.contains("allowed_window")) {
      window = TimeSchedule::from_document(config.at("allowed_window"));
    }
    return std::pair{max_seconds, window};
  });
  return [max_seconds, window = std::move(window)](const PluginInput& in) {
    if (in.job.requested_wallclock_seconds > max_seconds) {
      return PluginVerdict{Effect::kDeny, "requested " +
                                              std::to_string(in.job.requested_wallclock_seconds) +
                                              " s exceeds " + std::to_string(max_seconds) + " s"};
    }
    if (window && !window->active(in.now)) {
      return PluginVerdict{Effect::kDeny, "submission outside the allowed window"};
    }
    return PluginVerdict{Effect::kPermit, "within limits"};
  };
}

PluginFn make_voms_plugin(const Document& config) {
  require_keys("voms", config, {"acl", "require_assertion"});
  auto [acl, require] = parse_config("voms", [&] {
    FqanAcl acl = FqanAcl::from_document(get_array(config, "acl"));
    bool require = config.contains("require_assertion") && get_bool(config, "require_assertion");
    return std::pair{acl, require};
  });
  return [acl = std::move(acl), require = require](const PluginInput& in) {
    if (in.assertions.empty()) {
      return require ? PluginVerdict{Effect::kDeny, "no VO assertion presented"}
                     : PluginVerdict{Effect::kPermit, "no VO assertion; abstaining"};
    }
    bool all_verified = true;
    std::vector<Fqan> fqans =
        verified_fqans(in.assertions, in.trusted_servers, in.chain, in.now, &all_verified);
    if (!all_verified) return PluginVerdict{Effect::kDeny, "assertion failed verification"};
    std::optional<std::string> permitted;
    for (const auto& f : fqans) {
      auto effect = acl.first_match(f);
      if (effect == Effect::kDeny) return PluginVerdict{Effect::kDeny, f.render() + " denied by ACL"};
      if (effect == Effect::kPermit && !permitted) permitted = f.render();
    }
    if (permitted) return PluginVerdict{Effect::kPermit, *permitted + " permitted by ACL"};
    return PluginVerdict{Effect::kDeny, "no FQAN permitted by ACL"};
  };
}

PluginRegistry PluginRegistry::standard() {
  PluginRegistry r;
  r.add("blacklist", make_blacklist_plugin);
  r.add("wallclock", make_wallclock_plugin);
  r.add("voms", make_voms_plugin);
  return r;
}

void PluginRegistry::add(const std::string& name, PluginFactory factory) {
  factories_[name] = std::move(factory);
}

const PluginFactory* PluginRegistry::find(const std::string& name) const {
  auto it = factories_.find(name);
  return it == factories_.end() ? nullptr : &it->second;
}

// --- policy and evaluation --------------------------------------------------

SitePolicy::SitePolicy(std::vector<PluginSpec> plugins, TrustedServers trusted_servers,
                       const PluginRegistry& registry)
    : specs_(std::move(plugins)), trusted_servers_(std::move(trusted_servers)) {
  std::set<std::string> seen;
  for (const auto& spec : specs_) {
    if (!seen.insert(spec.name).second) {
      throw Error(ErrorCode::kConfigError, "plugin '" + spec.name + "' listed twice");
    }
    const PluginFactory* factory = registry.find(spec.name);
    if (factory == nullptr) {
      throw Error(ErrorCode::kConfigError, "unknown plugin '" + spec.name + "'");
    }
    compiled_.push_back((*factory)(spec.config));
  }
}

SitePolicy SitePolicy::from_document(const Document& doc, const std::filesystem::path& base_dir,
                                     const PluginRegistry& registry) {
  std::vector<PluginSpec> specs;
  TrustedServers trusted;
  try {
    for (const auto& p : get_array(doc, "plugins")) {
      if (p.size() != 2) throw Error(ErrorCode::kParseError, "plugin entries are {name, config}");
      specs.push_back(PluginSpec{get_string(p, "name"), get_object(p, "config")});
    }
    std::size_t expected = 1;
    if (doc.contains("trusted_servers")) {
      trusted = trusted_servers_from_document(get_object(doc, "trusted_servers"));
      ++expected;
    }
    if (doc.contains("trusted_servers_file")) {
      std::filesystem::path file = get_string(doc, "trusted_servers_file");
      if (file.is_relative()) file = base_dir / file;
      for (auto& [vo, key] : trusted_servers_from_document(read_document(file))) {
        trusted.emplace(vo, std::move(key));
      }
      ++expected;
    }
    if (doc.size() != expected) throw Error(ErrorCode::kParseError, "unexpected policy fields");
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfigError) throw;
    throw Error(ErrorCode::kConfigError, std::string("site policy: ") + e.what());
  }
  return SitePolicy(std::move(specs), std::move(trusted), registry);
}

SitePolicy SitePolicy::load(const std::filesystem::path& path, const PluginRegistry& registry) {
  Document doc;
  try {
    doc = read_document(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfigError, std::string("site policy: ") + e.what());
  }
  return from_document(doc, path.parent_path(), registry);
}

Document Decision::to_document() const {
  Document arr = Document::array();
  for (const auto& t : trace) {
    arr.push_back(Document{{"plugin", t.plugin},
                           {"verdict", effect_name(t.verdict)},
                           {"reason", t.reason}});
  }
  return Document{{"allowed", allowed}, {"trace", std::move(arr)}};
}

Decision lcas_evaluate(const SitePolicy& policy, const CredentialChain& chain,
                       const std::vector<AttributeAssertion>& assertions, const JobSpec& job,
                       Timestamp now) {
  Decision d;
  PluginInput in{chain, assertions, job, policy.trusted_servers(), now};
  bool all_permit = !policy.compiled().empty();
  for (std::size_t i = 0; i < policy.compiled().size(); ++i) {
    TraceEntry entry{policy.plugins()[i].name, Effect::kDeny, {}};
    try {
      PluginVerdict v = policy.compiled()[i](in);
      entry.verdict = v.verdict;
      entry.reason = std::move(v.reason);
    } catch (const std::exception& e) {
      entry.reason = std::string("fault: ") + e.what();
    }
    d.trace.push_back(std::move(entry));
    if (d.trace.back().verdict == Effect::kDeny) {
      all_permit = false;
      break;
    }
  }
  d.allowed = all_permit;
  return d;
}

ServiceDecision service_authorize(const ServicePolicy& policy, const CredentialChain& chain,
                                  const std::vector<AttributeAssertion>& assertions,
                                  const std::string& method, Timestamp now) {
  const std::vector<FqanPattern>* required = nullptr;
  if (auto it = policy.methods.find(method); it != policy.methods.end()) {
    required = &it->second;
  } else if (policy.default_rule) {
    required = &*policy.default_rule;
  } else {
    throw Error(ErrorCode::kUnknownMethod, "no rule for method '" + method + "'");
  }
  for (const auto& f : verified_fqans(assertions, policy.trusted_servers, chain, now)) {
    for (const auto& p : *required) {
      if (p.matches(f)) return ServiceDecision{true, f.render() + " satisfies " + p.render()};
    }
  }
  if (policy.gridmap_fallback && !chain.identities.empty() &&
      policy.gridmap_fallback->contains(chain.end_entity().subject)) {
    return ServiceDecision{true, "subject listed in grid-mapfile"};
  }
  return ServiceDecision{false, "no verified FQAN satisfies method '" + method + "'"};
}

}  // namespace gridauth
