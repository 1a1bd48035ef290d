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

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>

#include "gridauth/registry.h"

namespace gridauth {

/// One VO's registry behind a single-writer / multiple-reader lock, optionally
/// persisted to a directory holding `audit.log` (append-only, authoritative)
/// and `registry.snapshot` (derived state, rewritten atomically after every
/// mutation).
///
/// A mutation runs against a private copy; its audit records are appended and
/// fsynced, the snapshot is replaced by rename, and only then does the copy
/// become visible to readers.
class VoStore {
 public:
  static constexpr const char* kAuditFile = "audit.log";
  static constexpr const char* kSnapshotFile = "registry.snapshot";

  explicit VoStore(VoRegistry registry, std::optional<std::filesystem::path> dir = std::nullopt);

  static std::unique_ptr<VoStore> create(const std::filesystem::path& dir, const std::string& vo,
                                         const SubjectName& owner, Timestamp now);
  /// Replays and verifies the audit log; rewrites a stale snapshot.
  static std::unique_ptr<VoStore> open(const std::filesystem::path& dir);

  template <typename F>
  auto read(F&& f) const {
    std::shared_lock lock(mutex_);
    return f(static_cast<const VoRegistry&>(registry_));
  }

  /// `f` receives a mutable copy; its result is returned by value.
  template <typename F>
  auto write(F&& f) {
    std::unique_lock lock(mutex_);
    VoRegistry next = registry_;
    std::size_t before = next.audit_log().size();
    auto result = f(next);
    persist(next, before);
    registry_ = std::move(next);
    return result;
  }

  VoRegistry copy() const {
    std::shared_lock lock(mutex_);
    return registry_;
  }

  const std::optional<std::filesystem::path>& directory() const { return dir_; }

 private:
  void persist(const VoRegistry& next, std::size_t first_new_record) const;

  mutable std::shared_mutex mutex_;
  VoRegistry registry_;
  std::optional<std::filesystem::path> dir_;
};

}  // namespace gridauth
