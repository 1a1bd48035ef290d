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


// gridauth command-line tool.
//
// Exit status: 0 success, 1 authorization or validation failure,
// 2 transport, parse, configuration or usage failure.

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gridauth/admin.h"
#include "gridauth/authority.h"
#include "gridauth/credential.h"
#include "gridauth/gatekeeper.h"
#include "gridauth/gridmap.h"
#include "gridauth/lcas.h"
#include "gridauth/lcmaps.h"
#include "gridauth/proxy_tool.h"
#include "gridauth/registry_store.h"
#include "gridauth/transport.h"

namespace fs = std::filesystem;
using namespace gridauth;

namespace {

constexpr int kExitDenied = 1;
constexpr int kExitFailure = 2;

std::optional<Timestamp> g_now;

Timestamp now() { return g_now ? *g_now : wall_clock_now(); }

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kTransportError:
    case ErrorCode::kEndpointUnreachable:
    case ErrorCode::kParseError:
    case ErrorCode::kIoError:
    case ErrorCode::kMalformedRequest:
    case ErrorCode::kMalformedPayload:
    case ErrorCode::kMalformedConfig:
    case ErrorCode::kConfigError:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kUnsupportedValue:
      return kExitFailure;
    default:
      return kExitDenied;
  }
}

void print(const Document& doc) { std::cout << doc.dump(2) << "\n"; }

Window lifetime_window(Timestamp days) { return Window{now(), now() + days * 86400}; }

TrustedServers load_trusted_servers(const std::string& path) {
  if (path.empty()) return {};
  return trusted_servers_from_document(read_document(path));
}

int run_server_forever(HttpServer& server, const std::string& listen) {
  auto [host, port] = parse_endpoint(listen);
  int bound = server.bind(host, port);
  std::cout << "listening on " << host << ":" << bound << std::endl;
  server.run();
  return 0;
}

// --- PKI ----------------------------------------------------------------------

struct CaInit {
  std::string subject, out, anchor_out;
  Timestamp days = 3650;
};

int ca_init(const CaInit& o) {
  auto ca = CertificateAuthority::create_root(SubjectName::parse(o.subject), lifetime_window(o.days));
  ca.save(o.out);
  write_document(o.anchor_out, ca.credential().to_document());
  std::cout << "root " << o.subject << " written to " << o.out << "\n";
  return 0;
}

struct CaIssue {
  std::string ca, subject, key_out, chain_out;
  Timestamp days = 365;
  bool authority = false;
};

int ca_issue(const CaIssue& o) {
  auto ca = CertificateAuthority::load(o.ca);
  SecretKey key = SecretKey::generate();
  IdentityCredential cred =
      ca.issue(SubjectName::parse(o.subject), key.public_key(), lifetime_window(o.days), o.authority);
  ca.save(o.ca);
  key.save(o.key_out);
  CredentialChain chain;
  chain.identities = {cred, ca.credential()};
  save_chain(o.chain_out, chain);
  std::cout << "issued serial " << cred.serial << " to " << o.subject << "\n";
  return 0;
}

struct CaCrl {
  std::string ca, out;
  std::vector<std::uint64_t> revoke;
};

int ca_crl(const CaCrl& o) {
  auto ca = CertificateAuthority::load(o.ca);
  RevocationList crl =
      ca.issue_revocation_list(std::set<std::uint64_t>(o.revoke.begin(), o.revoke.end()), now());
  write_document(o.out, crl.to_document());
  return 0;
}

// --- VO server ------------------------------------------------------------------

struct VoInit {
  std::string dir, vo, owner;
};

int vo_init(const VoInit& o) {
  VoStore::create(o.dir, o.vo, SubjectName::parse(o.owner), now());
  std::cout << "created VO " << o.vo << " in " << o.dir << "\n";
  return 0;
}

struct TrustServer {
  std::string vo, chain, file;
};

int trust_server(const TrustServer& o) {
  TrustedServers servers;
  if (fs::exists(o.file)) servers = load_trusted_servers(o.file);
  servers[o.vo] = load_chain(o.chain).end_entity().public_key;
  write_document(o.file, trusted_servers_document(servers));
  return 0;
}

struct Serve {
  std::vector<std::string> vo_dirs, crls;
  std::string listen, chain, key, trust_dir;
  Timestamp max_lifetime = kDefaultProxyLifetime;
};

int serve(const Serve& o) {
  CredentialChain chain = load_chain(o.chain);
  ServerIdentity identity{chain.end_entity(), SecretKey::load(o.key)};
  TrustStore anchors = TrustStore::load_directory(o.trust_dir);
  std::vector<fs::path> crl_paths(o.crls.begin(), o.crls.end());
  std::vector<RevocationList> crls = load_revocation_lists(crl_paths);

  std::vector<std::unique_ptr<VoStore>> stores;
  std::vector<std::unique_ptr<AttributeServer>> servers;
  AttributeService service;
  for (const auto& dir : o.vo_dirs) {
    stores.push_back(VoStore::open(dir));
    ServerPolicy policy;
    policy.vo = stores.back()->read([](const VoRegistry& r) { return r.vo(); });
    policy.max_assertion_lifetime = o.max_lifetime;
    policy.trust_anchors = anchors;
    policy.revocation_lists = crls;
    servers.push_back(std::make_unique<AttributeServer>(*stores.back(), identity, policy));
    service.add(*servers.back());
  }
  HttpServer http;
  http.route(kAttributesPath,
             [&service](const std::string& body) { return service.handle_http(body, now()); });
  std::unique_ptr<AdminService> admin;
  if (stores.size() == 1) {
    admin = std::make_unique<AdminService>(*stores.front(), anchors, crls);
    admin->install(http);
  } else {
    std::cerr << "admin endpoints disabled: serving more than one VO\n";
  }
  return run_server_forever(http, o.listen);
}

// --- proxies ------------------------------------------------------------------

struct ProxyInit {
  std::vector<std::string> servers, voms, subsets;
  std::string chain, key, out, include_auth, auth_label = "user-supplied", trusted;
  Timestamp lifetime = kDefaultProxyLifetime;
};

int proxy_init_cmd(const ProxyInit& o) {
  ProxyInitOptions options;
  options.lifetime = o.lifetime;
  options.trusted_servers = load_trusted_servers(o.trusted);
  if (!o.voms.empty()) {
    if (o.servers.empty() || (o.servers.size() != 1 && o.servers.size() != o.voms.size())) {
      throw Error(ErrorCode::kInvalidArgument, "give one --server, or one per --voms");
    }
    if (o.trusted.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "--trusted-servers is required with --voms");
    }
  }
  for (std::size_t i = 0; i < o.voms.size(); ++i) {
    AttributeSource source;
    source.endpoint = o.servers.size() == 1 ? o.servers[0] : o.servers[i];
    const std::string& spec = o.voms[i];
    auto colon = spec.find(':');
    source.vo = spec.substr(0, colon);
    if (colon != std::string::npos) {
      source.subset = std::vector<Fqan>{Fqan::parse(spec.substr(colon + 1))};
    }
    options.sources.push_back(std::move(source));
  }
  for (const auto& text : o.subsets) {
    Fqan fqan = Fqan::parse(text);
    bool placed = false;
    for (auto& source : options.sources) {
      if (source.vo != fqan.vo()) continue;
      if (!source.subset) source.subset.emplace();
      source.subset->push_back(fqan);
      placed = true;
      break;
    }
    if (!placed) throw Error(ErrorCode::kInvalidArgument, "--subset " + text + " names no --voms VO");
  }
  if (!o.include_auth.empty()) {
    options.user_supplied = UserSupplied{o.auth_label, to_bytes(read_file(o.include_auth))};
  }
  ProxyInitResult result = proxy_init(load_chain(o.chain), SecretKey::load(o.key), options,
                                      http_transport(), now());
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
  result.bundle.save(o.out);
  std::cout << "proxy written to " << o.out << " (" << result.assertions.size()
            << " VO assertion(s))\n";
  return 0;
}

struct ProxyInfo {
  std::string file, trusted;
  bool json = false;
};

int proxy_info_cmd(const ProxyInfo& o) {
  ProxyReport report = proxy_info(ProxyBundle::load(o.file), load_trusted_servers(o.trusted), now());
  if (o.json) {
    print(report.to_document());
  } else {
    std::cout << report.to_text();
  }
  return 0;
}

// --- site enforcement ------------------------------------------------------------

struct LcasEval {
  std::string policy, proxy, job;
};

int lcas_eval(const LcasEval& o) {
  SitePolicy policy = SitePolicy::load(o.policy);
  ProxyBundle bundle = ProxyBundle::load(o.proxy);
  JobSpec job = JobSpec::from_document(read_document(o.job));
  Decision d = lcas_evaluate(policy, bundle.chain, extract_assertions(bundle.proxy()), job, now());
  print(d.to_document());
  return d.allowed ? 0 : kExitDenied;
}

struct LcmapsMap {
  std::string policy, leasedir, proxy, trusted;
};

int lcmaps_map_cmd(const LcmapsMap& o) {
  MappingPolicy policy = MappingPolicy::load(o.policy);
  ProxyBundle bundle = ProxyBundle::load(o.proxy);
  std::vector<Fqan> fqans = verified_fqans(extract_assertions(bundle.proxy()),
                                           load_trusted_servers(o.trusted), bundle.chain, now());
  LeaseLedger ledger(o.leasedir);
  print(lcmaps_map(policy, ledger, bundle.chain.end_entity().subject, fqans, now()).to_document());
  return 0;
}

struct LeaseGc {
  std::string leasedir;
  Timestamp idle = 0;
};

int lease_gc(const LeaseGc& o) {
  LeaseLedger ledger(o.leasedir);
  for (const auto& lease : ledger.gc(o.idle, now())) {
    std::cout << lease.pool << " " << lease.account << " " << lease.subject << "\n";
  }
  return 0;
}

struct Gate {
  std::string config, proxy, job;
};

int gate(const Gate& o) {
  GateConfig config = GateConfig::load(o.config);
  GateRequest request{read_file(o.proxy), JobSpec::from_document(read_document(o.job))};
  GateResponse response = gate_handle(config, request, now());
  print(response.to_document());
  return response.allowed ? 0 : kExitDenied;
}

struct ServeGate {
  std::string config, listen;
};

int serve_gate(const ServeGate& o) {
  GateConfig config = GateConfig::load(o.config);
  HttpServer http;
  http.route(kSubmitPath,
             [&config](const std::string& body) { return gate_handle_http(config, body, now()); });
  return run_server_forever(http, o.listen);
}

// --- administration ------------------------------------------------------------

struct AdminCommon {
  std::string server, chain, key;

  AdminClient client() const {
    return AdminClient(server, load_chain(chain), SecretKey::load(key), http_transport());
  }
};

struct Mkgridmap {
  std::string config, out, chain, key;
};

int mkgridmap(const Mkgridmap& o) {
  MkgridmapConfig config = MkgridmapConfig::load(o.config);
  CredentialChain chain = load_chain(o.chain);
  SecretKey key = SecretKey::load(o.key);
  Transport transport = http_transport();
  UserListFetcher fetcher = [&](const std::string& endpoint, const Fqan& fqan, Timestamp t) {
    return AdminClient(endpoint, chain, key, transport).userlist(fqan, t);
  };
  GridMapfile out = mkgridmap_generate(config, fetcher, now());
  write_file_atomic(o.out, out.emit());
  std::cout << out.entries().size() << " entries written to " << o.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGPIPE, SIG_IGN);
  CLI::App app{"gridauth: VO membership, attribute assertions and site authorization"};
  app.require_subcommand(1);
  Timestamp now_override = 0;
  app.fallthrough();
  app.add_option("--now", now_override, "Override the current time (UTC seconds)");
  std::function<int()> action;

  CaInit ca_init_o;
  auto* c = app.add_subcommand("ca-init", "Create a self-signed root authority");
  c->add_option("--subject", ca_init_o.subject)->required();
  c->add_option("--out", ca_init_o.out, "Authority file (key included)")->required();
  c->add_option("--anchor-out", ca_init_o.anchor_out, "Trust anchor credential file")->required();
  c->add_option("--days", ca_init_o.days);
  c->callback([&] { action = [&] { return ca_init(ca_init_o); }; });

  CaIssue ca_issue_o;
  c = app.add_subcommand("ca-issue", "Issue an identity credential");
  c->add_option("--ca", ca_issue_o.ca)->required();
  c->add_option("--subject", ca_issue_o.subject)->required();
  c->add_option("--key-out", ca_issue_o.key_out)->required();
  c->add_option("--chain-out", ca_issue_o.chain_out)->required();
  c->add_option("--days", ca_issue_o.days);
  c->add_flag("--authority", ca_issue_o.authority);
  c->callback([&] { action = [&] { return ca_issue(ca_issue_o); }; });

  CaCrl ca_crl_o;
  c = app.add_subcommand("ca-crl", "Issue a revocation list");
  c->add_option("--ca", ca_crl_o.ca)->required();
  c->add_option("--revoke", ca_crl_o.revoke, "Serial to revoke (repeatable)");
  c->add_option("--out", ca_crl_o.out)->required();
  c->callback([&] { action = [&] { return ca_crl(ca_crl_o); }; });

  VoInit vo_init_o;
  c = app.add_subcommand("vo-init", "Create a VO registry directory");
  c->add_option("--dir", vo_init_o.dir)->required();
  c->add_option("--vo", vo_init_o.vo)->required();
  c->add_option("--owner", vo_init_o.owner)->required();
  c->callback([&] { action = [&] { return vo_init(vo_init_o); }; });

  TrustServer trust_o;
  c = app.add_subcommand("trust-server", "Add a VO server key to a trusted-servers file");
  c->add_option("--vo", trust_o.vo)->required();
  c->add_option("--chain", trust_o.chain, "The server's credential chain")->required();
  c->add_option("--file", trust_o.file)->required();
  c->callback([&] { action = [&] { return trust_server(trust_o); }; });

  Serve serve_o;
  c = app.add_subcommand("serve", "Run the attribute and admin service");
  c->add_option("--listen", serve_o.listen, "host:port")->required();
  c->add_option("--vo-dir", serve_o.vo_dirs)->required();
  c->add_option("--chain", serve_o.chain)->required();
  c->add_option("--key", serve_o.key)->required();
  c->add_option("--trust", serve_o.trust_dir, "Trust anchor directory")->required();
  c->add_option("--crl", serve_o.crls);
  c->add_option("--max-lifetime", serve_o.max_lifetime);
  c->callback([&] { action = [&] { return serve(serve_o); }; });

  ProxyInit pi;
  c = app.add_subcommand("proxy-init", "Create a proxy carrying VO attribute assertions");
  c->add_option("--server", pi.servers, "host:port (one, or one per --voms)");
  c->add_option("--voms", pi.voms, "VO or VO:FQAN");
  c->add_option("--subset", pi.subsets, "Request only this FQAN");
  c->add_option("--lifetime", pi.lifetime);
  c->add_option("--include-auth", pi.include_auth, "File embedded as opaque user data");
  c->add_option("--auth-label", pi.auth_label);
  c->add_option("--trusted-servers", pi.trusted);
  c->add_option("--chain", pi.chain)->required();
  c->add_option("--key", pi.key)->required();
  c->add_option("--out", pi.out)->required();
  c->callback([&] { action = [&] { return proxy_init_cmd(pi); }; });

  ProxyInfo info_o;
  c = app.add_subcommand("proxy-info", "Describe a proxy file");
  c->add_option("--file", info_o.file)->required();
  c->add_option("--trusted-servers", info_o.trusted);
  c->add_flag("--json", info_o.json);
  c->callback([&] { action = [&] { return proxy_info_cmd(info_o); }; });

  LcasEval lcas_o;
  c = app.add_subcommand("lcas-eval", "Run the site authorization chain");
  c->add_option("--policy", lcas_o.policy)->required();
  c->add_option("--proxy", lcas_o.proxy)->required();
  c->add_option("--job", lcas_o.job)->required();
  c->callback([&] { action = [&] { return lcas_eval(lcas_o); }; });

  LcmapsMap lcmaps_o;
  c = app.add_subcommand("lcmaps-map", "Map a proxy to a local credential");
  c->add_option("--policy", lcmaps_o.policy)->required();
  c->add_option("--leasedir", lcmaps_o.leasedir)->required();
  c->add_option("--proxy", lcmaps_o.proxy)->required();
  c->add_option("--trusted-servers", lcmaps_o.trusted);
  c->callback([&] { action = [&] { return lcmaps_map_cmd(lcmaps_o); }; });

  LeaseGc gc_o;
  c = app.add_subcommand("lease-gc", "Free idle pool-account leases");
  c->add_option("--leasedir", gc_o.leasedir)->required();
  c->add_option("--idle", gc_o.idle, "Idle seconds")->required();
  c->callback([&] { action = [&] { return lease_gc(gc_o); }; });

  Gate gate_o;
  c = app.add_subcommand("gate", "Run the gatekeeper pipeline on one request");
  c->add_option("--config", gate_o.config)->required();
  c->add_option("--proxy", gate_o.proxy)->required();
  c->add_option("--job", gate_o.job)->required();
  c->callback([&] { action = [&] { return gate(gate_o); }; });

  ServeGate sg_o;
  c = app.add_subcommand("serve-gate", "Run the gatekeeper service");
  c->add_option("--config", sg_o.config)->required();
  c->add_option("--listen", sg_o.listen)->required();
  c->callback([&] { action = [&] { return serve_gate(sg_o); }; });

  Mkgridmap mk_o;
  c = app.add_subcommand("mkgridmap", "Generate a grid-mapfile from VO servers");
  c->add_option("--config", mk_o.config)->required();
  c->add_option("--out", mk_o.out)->required();
  c->add_option("--chain", mk_o.chain)->required();
  c->add_option("--key", mk_o.key)->required();
  c->callback([&] { action = [&] { return mkgridmap(mk_o); }; });

  // Admin verbs share the connection options and print the result document.
  AdminCommon admin_o;
  auto* admin = app.add_subcommand("admin", "Call the VO administration service");
  admin->require_subcommand(1);
  admin->fallthrough();
  admin->add_option("--server", admin_o.server, "host:port")->required();
  admin->add_option("--chain", admin_o.chain)->required();
  admin->add_option("--key", admin_o.key)->required();
  std::string path;
  Document params = Document::object();
  std::map<std::string, std::string> s;
  std::uint64_t id = 0;
  bool flag = false;
  std::vector<std::string> groups;
  auto verb = [&](const std::string& name, const std::string& help, const std::string& endpoint,
                  std::function<void()> build) {
    auto* v = admin->add_subcommand(name, help);
    v->callback([&, endpoint, build] {
      path = endpoint;
      build();
      action = [&] {
        print(admin_o.client().call(path, params, now()));
        return 0;
      };
    });
    return v;
  };
  auto str = [&](CLI::App* v, const std::string& key, bool required) {
    auto* opt = v->add_option("--" + key, s[key]);
    if (required) opt->required();
  };
  auto put = [&](const std::string& key) {
    if (!s[key].empty()) params[key] = s[key];
  };

  auto* v = verb("whoami", "Show the caller's attributes", "/core/whoami", [] {});
  v = verb("create-group", "Create a group", "/admin/create-group", [&] {
    put("parent");
    put("name");
    if (flag) params["forced"] = true;
  });
  str(v, "parent", false);
  str(v, "name", true);
  v->add_flag("--forced", flag);
  v = verb("link-group", "Add a parent to a group", "/admin/link-group", [&] {
    put("group");
    put("parent");
  });
  str(v, "group", true);
  str(v, "parent", true);
  v = verb("add-user", "Grant group membership", "/admin/add-user", [&] {
    put("user");
    put("group");
  });
  str(v, "user", true);
  str(v, "group", true);
  v = verb("grant", "Grant a role or capability", "/admin/grant", [&] {
    put("user");
    put("group");
    put("kind");
    put("name");
    if (!s["schedule"].empty()) params["schedule"] = read_document(s["schedule"]);
  });
  str(v, "user", true);
  str(v, "group", true);
  str(v, "kind", true);
  str(v, "name", false);
  str(v, "schedule", false);
  v = verb("revoke-grant", "Revoke a grant", "/admin/revoke-grant",
           [&] { params["grant_id"] = id; });
  v->add_option("--id", id)->required();
  v = verb("delegate", "Delegate group administration", "/admin/delegate", [&] {
    put("admin");
    put("group");
  });
  str(v, "admin", true);
  str(v, "group", true);
  v = verb("list-users", "List current members of a group", "/admin/list-users",
           [&] { put("group"); });
  str(v, "group", false);
  v = verb("show-history", "Show audit records", "/history", [&] { params["since"] = id; });
  v->add_option("--since", id);
  v = verb("request", "Ask to join groups", "/request/submit", [&] { params["groups"] = groups; });
  v->add_option("--group", groups)->required();
  v = verb("list-requests", "List membership requests", "/request/list", [] {});
  v = verb("decide", "Approve or reject a request", "/request/decide", [&] {
    params["request_id"] = id;
    params["approve"] = flag;
  });
  v->add_option("--id", id)->required();
  v->add_flag("--approve,!--reject", flag);
  v = verb("userlist", "Subjects currently holding an FQAN", "/compat/userlist",
           [&] { put("fqan"); });
  str(v, "fqan", true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitFailure;
  }
  if (app.count("--now") > 0) g_now = now_override;
  try {
    return action();
  } catch (const Error& e) {
    std::cerr << "error: " << error_code_name(e.code()) << ": " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}
