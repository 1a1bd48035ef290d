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

// Local credential mapping: grid subject + FQANs -> (account, uid, gids),
// with pool accounts leased through a directory of lease records.
//
// Lease directory layout:
//   <dir>/<pool>/<encoded_subject>     lease record document
//   <dir>/<pool>/.accounts/<account>   claim marker, created exclusively
//   <dir>/<pool>/.lock                 advisory lock serializing mutations

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "gridauth/credential.h"
#include "gridauth/fqan.h"
#include "gridauth/subject.h"

namespace gridauth {

struct LocalCredential {
  std::string account;
  std::uint32_t uid = 0;
  std::uint32_t primary_gid = 0;
  std::set<std::uint32_t> supplementary_gids;

  Document to_document() const;
  static LocalCredential from_document(const Document& doc);

  friend bool operator==(const LocalCredential&, const LocalCredential&) = default;
};

/// Lowercases the rendered subject, then percent-encodes (lowercase hex)
/// every byte outside [a-z0-9].
std::string encode_subject(const SubjectName& subject);

struct StaticAccount {
  std::uint32_t uid = 0;
  std::uint32_t default_gid = 0;
};

struct PoolAccount {
  std::string account;
  std::uint32_t uid = 0;
};

struct Pool {
  std::vector<PoolAccount> accounts;
  std::uint32_t default_gid = 0;

  /// Account names in allocation (lexicographic) order.
  std::vector<std::string> account_names() const;
  const PoolAccount* find(const std::string& account) const;
};

struct StaticMapRule {
  std::map<SubjectName, std::string> accounts;
};

struct PoolMapRule {
  FqanPattern pattern;
  std::string pool;
};

using UidRule = std::variant<StaticMapRule, PoolMapRule>;

struct GidRule {
  FqanPattern pattern;
  std::uint32_t gid = 0;
  bool primary = false;
};

struct MappingPolicy {
  std::map<std::string, StaticAccount> static_accounts;
  std::vector<UidRule> uid_rules;
  std::vector<GidRule> gid_rules;
  std::map<std::string, Pool> pools;

  /// Errors: kConfigError (no uid rule, duplicate pool accounts, dangling
  /// account or pool references, bad names).
  void validate() const;

  Document to_document() const;
  static MappingPolicy from_document(const Document& doc);
  static MappingPolicy load(const std::filesystem::path& path);
};

struct Lease {
  std::string pool;
  std::string account;
  std::string subject;
  Timestamp leased_at = 0;
  Timestamp last_used = 0;

  Document to_document() const;
  static Lease from_document(const Document& doc);
};

/// Safe for concurrent use from multiple threads and processes sharing the
/// same directory.
class LeaseLedger {
 public:
  explicit LeaseLedger(std::filesystem::path dir);

  /// Sticky: an existing lease is returned (with last_used refreshed);
  /// otherwise the lexicographically first unclaimed account is bound.
  /// Errors: kPoolExhausted.
  Lease acquire(const std::string& pool, const std::vector<std::string>& accounts,
                const SubjectName& subject, Timestamp now);
  /// Errors: kNoSuchLease.
  Lease release(const std::string& pool, const SubjectName& subject);
  /// Frees every lease with now - last_used >= idle_seconds.
  std::vector<Lease> gc(Timestamp idle_seconds, Timestamp now);

  std::optional<Lease> find(const std::string& pool, const SubjectName& subject) const;
  std::vector<Lease> leases(const std::string& pool) const;
  /// Accounts with a claim marker, sorted.
  std::vector<std::string> claimed_accounts(const std::string& pool) const;

  const std::filesystem::path& directory() const { return dir_; }

 private:
  std::filesystem::path pool_dir(const std::string& pool) const;

  std::filesystem::path dir_;
};

/// First applicable uid rule wins; every matching gid rule contributes.
/// Errors: kNoMappingRule, kPoolExhausted.
LocalCredential lcmaps_map(const MappingPolicy& policy, LeaseLedger& ledger,
                           const SubjectName& subject, const std::vector<Fqan>& fqans,
                           Timestamp now);

/// Maps through an explicit target: a static account name or ".<pool>".
/// Gid rules apply as in lcmaps_map. Errors: kNoMappingRule, kPoolExhausted.
LocalCredential lcmaps_map_target(const MappingPolicy& policy, LeaseLedger& ledger,
                                  const SubjectName& subject, const std::string& target,
                                  const std::vector<Fqan>& fqans, Timestamp now);

}  // namespace gridauth
