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

// grid-mapfile artifact and its generator.
//
// File grammar, one entry per line, LF endings, sorted by subject:
//   "<subject>" <target>
// where <target> is a local account name or ".<pool>" for a pool mapping.

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gridauth/credential.h"
#include "gridauth/fqan.h"
#include "gridauth/subject.h"

namespace gridauth {

struct GridMapEntry {
  SubjectName subject;
  std::string target;

  bool is_pool() const { return !target.empty() && target.front() == '.'; }
  std::string pool() const { return is_pool() ? target.substr(1) : std::string(); }

  friend bool operator==(const GridMapEntry&, const GridMapEntry&) = default;
};

/// Account names and pool names: [A-Za-z0-9._-]+; targets may add a leading '.'.
bool is_valid_account_name(std::string_view name);
bool is_valid_gridmap_target(std::string_view target);

class GridMapfile {
 public:
  GridMapfile() = default;

  /// Errors: kMalformedConfig (with line number), including duplicate subjects.
  static GridMapfile parse(std::string_view text);
  static GridMapfile load(const std::filesystem::path& path);

  /// Keeps the existing target when `subject` is already present; returns
  /// whether the entry was added. Errors: kInvalidArgument on a bad target.
  bool add(const SubjectName& subject, const std::string& target);
  bool remove(const SubjectName& subject);
  const GridMapEntry* find(const SubjectName& subject) const;
  bool contains(const SubjectName& subject) const { return find(subject) != nullptr; }

  const std::vector<GridMapEntry>& entries() const { return entries_; }
  std::string emit() const;

  friend bool operator==(const GridMapfile&, const GridMapfile&) = default;

 private:
  std::vector<GridMapEntry> entries_;
};

struct MkgridmapDirective {
  enum class Kind { kGroup, kAuth, kDeny };
  Kind kind = Kind::kGroup;
  std::string endpoint;           // group
  std::optional<Fqan> selector;   // group: "/vo" for a bare VO name
  SubjectName subject;            // auth, deny
  std::string target;             // group, auth
  int line = 0;
};

struct MkgridmapConfig {
  std::vector<MkgridmapDirective> directives;

  /// Errors: kMalformedConfig naming the offending line.
  static MkgridmapConfig parse(std::string_view text);
  static MkgridmapConfig load(const std::filesystem::path& path);
};

/// Returns the subjects currently holding `fqan` at the server `endpoint`.
using UserListFetcher =
    std::function<std::vector<SubjectName>(const std::string& endpoint, const Fqan& fqan,
                                           Timestamp now)>;

/// First directive wins for duplicate subjects; a subject named by any
/// `deny` never appears. Errors: kEndpointUnreachable (naming the endpoint).
GridMapfile mkgridmap_generate(const MkgridmapConfig& config, const UserListFetcher& fetcher,
                               Timestamp now);

}  // namespace gridauth
