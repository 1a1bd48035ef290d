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


#include "gridauth/lcmaps.h"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>

#include "gridauth/error.h"

namespace gridauth {
namespace {

constexpr const char* kAccountsDir = ".accounts";
constexpr const char* kLockFile = ".lock";

// flock() on a per-pool lock file. Each instance opens its own descriptor, so
// it excludes other threads of this process as well as other processes.
class PoolLock {
 public:
  PoolLock(const std::filesystem::path& pool_dir, bool exclusive) {
    fd_ = ::open((pool_dir / kLockFile).c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) {
      throw Error(ErrorCode::kIoError,
                  "cannot open lock in " + pool_dir.string() + ": " + std::strerror(errno));
    }
    while (::flock(fd_, exclusive ? LOCK_EX : LOCK_SH) != 0) {
      if (errno != EINTR) {
        ::close(fd_);
        throw Error(ErrorCode::kIoError, "flock failed: " + std::string(std::strerror(errno)));
      }
    }
  }
  ~PoolLock() { ::close(fd_); }
  PoolLock(const PoolLock&) = delete;
  PoolLock& operator=(const PoolLock&) = delete;

 private:
  int fd_ = -1;
};

bool is_record_name(const std::string& name) {
  return !name.empty() && name.find('.') == std::string::npos;
}

std::uint32_t get_u32(const Document& doc, std::string_view key) {
  std::uint64_t v = get_uint(doc, key);
  if (v > 0xffffffffu) throw Error(ErrorCode::kParseError, std::string(key) + " out of range");
  return static_cast<std::uint32_t>(v);
}

void check_name(const std::string& what, const std::string& name) {
  if (!Fqan::is_valid_name(name) || name.front() == '.') {
    throw Error(ErrorCode::kConfigError, "invalid " + what + " name '" + name + "'");
  }
}

bool claim_account(const std::filesystem::path& marker, const std::string& owner) {
  int fd = ::open(marker.c_str(), O_WRONLY | O_CREAT | O_EXCL | O_CLOEXEC, 0644);
  if (fd < 0) {
    if (errno == EEXIST) return false;
    throw Error(ErrorCode::kIoError, "cannot claim " + marker.string() + ": " +
                                         std::strerror(errno));
  }
  ssize_t n = ::write(fd, owner.data(), owner.size());
  ::close(fd);
  if (n != static_cast<ssize_t>(owner.size())) {
    ::unlink(marker.c_str());
    throw Error(ErrorCode::kIoError, "cannot write " + marker.string());
  }
  return true;
}

}  // namespace

// --- credentials and policy -------------------------------------------------

Document LocalCredential::to_document() const {
  return Document{{"account", account},
                  {"uid", uid},
                  {"primary_gid", primary_gid},
                  {"supplementary_gids", supplementary_gids}};
}

LocalCredential LocalCredential::from_document(const Document& doc) {
  if (doc.size() != 4) throw Error(ErrorCode::kParseError, "unexpected credential fields");
  LocalCredential c;
  c.account = get_string(doc, "account");
  c.uid = get_u32(doc, "uid");
  c.primary_gid = get_u32(doc, "primary_gid");
  for (const auto& g : get_array(doc, "supplementary_gids")) {
    if (!g.is_number_unsigned()) throw Error(ErrorCode::kParseError, "gid must be unsigned");
    c.supplementary_gids.insert(g.get<std::uint32_t>());
  }
  return c;
}

std::string encode_subject(const SubjectName& subject) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned char c : subject.render()) {
    if (c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c - 'A' + 'a');
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 0xf];
    }
  }
  return out;
}

std::vector<std::string> Pool::account_names() const {
  std::vector<std::string> names;
  for (const auto& a : accounts) names.push_back(a.account);
  std::sort(names.begin(), names.end());
  return names;
}

const PoolAccount* Pool::find(const std::string& account) const {
  for (const auto& a : accounts) {
    if (a.account == account) return &a;
  }
  return nullptr;
}

void MappingPolicy::validate() const {
  if (uid_rules.empty()) throw Error(ErrorCode::kConfigError, "mapping policy has no uid rule");
  std::set<std::string> accounts;
  for (const auto& [name, account] : static_accounts) {
    check_name("account", name);
    accounts.insert(name);
  }
  for (const auto& [name, pool] : pools) {
    check_name("pool", name);
    if (pool.accounts.empty()) throw Error(ErrorCode::kConfigError, "pool '" + name + "' is empty");
    for (const auto& a : pool.accounts) {
      check_name("account", a.account);
      if (!accounts.insert(a.account).second) {
        throw Error(ErrorCode::kConfigError, "account '" + a.account + "' defined twice");
      }
    }
  }
  for (const auto& rule : uid_rules) {
    if (const auto* s = std::get_if<StaticMapRule>(&rule)) {
      for (const auto& [subject, account] : s->accounts) {
        if (!static_accounts.count(account)) {
          throw Error(ErrorCode::kConfigError, "static map names unknown account '" + account + "'");
        }
      }
    } else if (!pools.count(std::get<PoolMapRule>(rule).pool)) {
      throw Error(ErrorCode::kConfigError,
                  "pool rule names unknown pool '" + std::get<PoolMapRule>(rule).pool + "'");
    }
  }
}

Document MappingPolicy::to_document() const {
  Document statics = Document::object();
  for (const auto& [name, a] : static_accounts) {
    statics[name] = Document{{"uid", a.uid}, {"gid", a.default_gid}};
  }
  Document uids = Document::array();
  for (const auto& rule : uid_rules) {
    if (const auto* s = std::get_if<StaticMapRule>(&rule)) {
      Document subjects = Document::object();
      for (const auto& [subject, account] : s->accounts) subjects[subject.render()] = account;
      uids.push_back(Document{{"kind", "static"}, {"subjects", std::move(subjects)}});
    } else {
      const auto& p = std::get<PoolMapRule>(rule);
      uids.push_back(Document{{"kind", "pool"}, {"pattern", p.pattern.render()}, {"pool", p.pool}});
    }
  }
  Document gids = Document::array();
  for (const auto& g : gid_rules) {
    gids.push_back(Document{{"pattern", g.pattern.render()}, {"gid", g.gid}, {"primary", g.primary}});
  }
  Document pools_doc = Document::object();
  for (const auto& [name, pool] : pools) {
    Document accounts = Document::array();
    for (const auto& a : pool.accounts) {
      accounts.push_back(Document{{"account", a.account}, {"uid", a.uid}});
    }
    pools_doc[name] = Document{{"accounts", std::move(accounts)}, {"default_gid", pool.default_gid}};
  }
  return Document{{"static_accounts", std::move(statics)},
                  {"uid_rules", std::move(uids)},
                  {"gid_rules", std::move(gids)},
                  {"pools", std::move(pools_doc)}};
}

MappingPolicy MappingPolicy::from_document(const Document& doc) {
  MappingPolicy p;
  try {
    if (doc.contains("static_accounts")) {
      for (const auto& [name, a] : get_object(doc, "static_accounts").items()) {
        p.static_accounts[name] = StaticAccount{get_u32(a, "uid"), get_u32(a, "gid")};
      }
    }
    for (const auto& r : get_array(doc, "uid_rules")) {
      std::string kind = get_string(r, "kind");
      if (kind == "static") {
        StaticMapRule rule;
        for (const auto& [subject, account] : get_object(r, "subjects").items()) {
          if (!account.is_string()) throw Error(ErrorCode::kParseError, "account must be a string");
          rule.accounts[SubjectName::parse(subject)] = account.get<std::string>();
        }
        p.uid_rules.push_back(std::move(rule));
      } else if (kind == "pool") {
        p.uid_rules.push_back(
            PoolMapRule{FqanPattern::parse(get_string(r, "pattern")), get_string(r, "pool")});
      } else {
        throw Error(ErrorCode::kParseError, "unknown uid rule kind '" + kind + "'");
      }
    }
    if (doc.contains("gid_rules")) {
      for (const auto& g : get_array(doc, "gid_rules")) {
        p.gid_rules.push_back(GidRule{FqanPattern::parse(get_string(g, "pattern")),
                                      get_u32(g, "gid"), get_bool(g, "primary")});
      }
    }
    if (doc.contains("pools")) {
      for (const auto& [name, pd] : get_object(doc, "pools").items()) {
        Pool pool;
        pool.default_gid = get_u32(pd, "default_gid");
        for (const auto& a : get_array(pd, "accounts")) {
          pool.accounts.push_back(PoolAccount{get_string(a, "account"), get_u32(a, "uid")});
        }
        p.pools[name] = std::move(pool);
      }
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfigError) throw;
    throw Error(ErrorCode::kConfigError, std::string("mapping policy: ") + e.what());
  }
  p.validate();
  return p;
}

MappingPolicy MappingPolicy::load(const std::filesystem::path& path) {
  Document doc;
  try {
    doc = read_document(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfigError, std::string("mapping policy: ") + e.what());
  }
  return from_document(doc);
}

// --- leases -----------------------------------------------------------------

Document Lease::to_document() const {
  return Document{{"pool", pool},
                  {"account", account},
                  {"subject", subject},
                  {"leased_at", leased_at},
                  {"last_used", last_used}};
}

Lease Lease::from_document(const Document& doc) {
  if (doc.size() != 5) throw Error(ErrorCode::kParseError, "unexpected lease fields");
  return Lease{get_string(doc, "pool"), get_string(doc, "account"), get_string(doc, "subject"),
               get_int(doc, "leased_at"), get_int(doc, "last_used")};
}

LeaseLedger::LeaseLedger(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::filesystem::path LeaseLedger::pool_dir(const std::string& pool) const {
  check_name("pool", pool);
  return dir_ / pool;
}

Lease LeaseLedger::acquire(const std::string& pool, const std::vector<std::string>& accounts,
                           const SubjectName& subject, Timestamp now) {
  const auto dir = pool_dir(pool);
  std::filesystem::create_directories(dir / kAccountsDir);
  PoolLock lock(dir, true);
  const std::string encoded = encode_subject(subject);
  const auto record = dir / encoded;
  if (std::filesystem::exists(record)) {
    Lease lease = Lease::from_document(read_document(record));
    if (now > lease.last_used) {
      lease.last_used = now;
      write_document(record, lease.to_document());
    }
    return lease;
  }
  std::vector<std::string> order = accounts;
  std::sort(order.begin(), order.end());
  for (const auto& account : order) {
    check_name("account", account);
    if (!claim_account(dir / kAccountsDir / account, encoded)) continue;
    Lease lease{pool, account, subject.render(), now, now};
    try {
      write_document(record, lease.to_document());
    } catch (...) {
      std::filesystem::remove(dir / kAccountsDir / account);
      throw;
    }
    return lease;
  }
  throw Error(ErrorCode::kPoolExhausted, "pool '" + pool + "' has no free account");
}

Lease LeaseLedger::release(const std::string& pool, const SubjectName& subject) {
  const auto dir = pool_dir(pool);
  const auto record = dir / encode_subject(subject);
  if (!std::filesystem::exists(dir)) {
    throw Error(ErrorCode::kNoSuchLease, subject.render() + " holds no lease in '" + pool + "'");
  }
  PoolLock lock(dir, true);
  if (!std::filesystem::exists(record)) {
    throw Error(ErrorCode::kNoSuchLease, subject.render() + " holds no lease in '" + pool + "'");
  }
  Lease lease = Lease::from_document(read_document(record));
  std::filesystem::remove(record);
  std::filesystem::remove(dir / kAccountsDir / lease.account);
  return lease;
}

std::vector<Lease> LeaseLedger::gc(Timestamp idle_seconds, Timestamp now) {
  std::vector<Lease> freed;
  for (const auto& pool_entry : std::filesystem::directory_iterator(dir_)) {
    if (!pool_entry.is_directory()) continue;
    const auto dir = pool_entry.path();
    PoolLock lock(dir, true);
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      if (!entry.is_regular_file() || !is_record_name(entry.path().filename().string())) continue;
      Lease lease = Lease::from_document(read_document(entry.path()));
      if (now - lease.last_used < idle_seconds) continue;
      std::filesystem::remove(entry.path());
      std::filesystem::remove(dir / kAccountsDir / lease.account);
      freed.push_back(std::move(lease));
    }
  }
  std::sort(freed.begin(), freed.end(), [](const Lease& a, const Lease& b) {
    return std::tie(a.pool, a.account) < std::tie(b.pool, b.account);
  });
  return freed;
}

std::optional<Lease> LeaseLedger::find(const std::string& pool, const SubjectName& subject) const {
  const auto dir = pool_dir(pool);
  if (!std::filesystem::exists(dir)) return std::nullopt;
  PoolLock lock(dir, false);
  const auto record = dir / encode_subject(subject);
  if (!std::filesystem::exists(record)) return std::nullopt;
  return Lease::from_document(read_document(record));
}

std::vector<Lease> LeaseLedger::leases(const std::string& pool) const {
  std::vector<Lease> out;
  const auto dir = pool_dir(pool);
  if (!std::filesystem::exists(dir)) return out;
  PoolLock lock(dir, false);
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_record_name(entry.path().filename().string())) {
      out.push_back(Lease::from_document(read_document(entry.path())));
    }
  }
  std::sort(out.begin(), out.end(),
            [](const Lease& a, const Lease& b) { return a.account < b.account; });
  return out;
}

std::vector<std::string> LeaseLedger::claimed_accounts(const std::string& pool) const {
  std::vector<std::string> out;
  const auto accounts = pool_dir(pool) / kAccountsDir;
  if (!std::filesystem::exists(accounts)) return out;
  for (const auto& entry : std::filesystem::directory_iterator(accounts)) {
    out.push_back(entry.path().filename().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// --- mapping ----------------------------------------------------------------

namespace {

LocalCredential finish(const MappingPolicy& policy, std::string account, std::uint32_t uid,
                       std::uint32_t default_gid, const std::vector<Fqan>& fqans) {
  LocalCredential c{std::move(account), uid, default_gid, {}};
  bool primary_set = false;
  for (const auto& rule : policy.gid_rules) {
    bool hit = std::any_of(fqans.begin(), fqans.end(),
                           [&](const Fqan& f) { return rule.pattern.matches(f); });
    if (!hit) continue;
    c.supplementary_gids.insert(rule.gid);
    if (rule.primary && !primary_set) {
      c.primary_gid = rule.gid;
      primary_set = true;
    }
  }
  c.supplementary_gids.erase(c.primary_gid);
  return c;
}

LocalCredential map_static(const MappingPolicy& policy, const std::string& account,
                           const std::vector<Fqan>& fqans) {
  auto it = policy.static_accounts.find(account);
  if (it == policy.static_accounts.end()) {
    throw Error(ErrorCode::kNoMappingRule, "no static account '" + account + "'");
  }
  return finish(policy, account, it->second.uid, it->second.default_gid, fqans);
}

LocalCredential map_pool(const MappingPolicy& policy, LeaseLedger& ledger,
                         const std::string& pool_name, const SubjectName& subject,
                         const std::vector<Fqan>& fqans, Timestamp now) {
  auto it = policy.pools.find(pool_name);
  if (it == policy.pools.end()) {
    throw Error(ErrorCode::kNoMappingRule, "no pool '" + pool_name + "'");
  }
  const Pool& pool = it->second;
  Lease lease = ledger.acquire(pool_name, pool.account_names(), subject, now);
  const PoolAccount* account = pool.find(lease.account);
  if (account == nullptr) {
    throw Error(ErrorCode::kNoMappingRule,
                "lease names account '" + lease.account + "' no longer in pool '" + pool_name + "'");
  }
  return finish(policy, account->account, account->uid, pool.default_gid, fqans);
}

}  // namespace

LocalCredential lcmaps_map(const MappingPolicy& policy, LeaseLedger& ledger,
                           const SubjectName& subject, const std::vector<Fqan>& fqans,
                           Timestamp now) {
  for (const auto& rule : policy.uid_rules) {
    if (const auto* s = std::get_if<StaticMapRule>(&rule)) {
      auto hit = s->accounts.find(subject);
      if (hit != s->accounts.end()) return map_static(policy, hit->second, fqans);
      continue;
    }
    const auto& p = std::get<PoolMapRule>(rule);
    if (std::any_of(fqans.begin(), fqans.end(), [&](const Fqan& f) { return p.pattern.matches(f); })) {
      return map_pool(policy, ledger, p.pool, subject, fqans, now);
    }
  }
  throw Error(ErrorCode::kNoMappingRule, "no mapping rule applies to " + subject.render());
}

LocalCredential lcmaps_map_target(const MappingPolicy& policy, LeaseLedger& ledger,
                                  const SubjectName& subject, const std::string& target,
                                  const std::vector<Fqan>& fqans, Timestamp now) {
  if (!target.empty() && target.front() == '.') {
    return map_pool(policy, ledger, target.substr(1), subject, fqans, now);
  }
  return map_static(policy, target, fqans);
}

}  // namespace gridauth
