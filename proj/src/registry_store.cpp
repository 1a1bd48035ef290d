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


#include "gridauth/registry_store.h"

#include "gridauth/error.h"

namespace gridauth {

VoStore::VoStore(VoRegistry registry, std::optional<std::filesystem::path> dir)
    : registry_(std::move(registry)), dir_(std::move(dir)) {}

std::unique_ptr<VoStore> VoStore::create(const std::filesystem::path& dir, const std::string& vo,
                                         const SubjectName& owner, Timestamp now) {
  std::filesystem::create_directories(dir);
  if (std::filesystem::exists(dir / kAuditFile)) {
    throw Error(ErrorCode::kIoError, "a registry already exists in " + dir.string());
  }
  auto store = std::make_unique<VoStore>(VoRegistry::create(vo, owner, now), dir);
  store->persist(store->registry_, 0);
  return store;
}

std::unique_ptr<VoStore> VoStore::open(const std::filesystem::path& dir) {
  AuditLog log = AuditLog::load(dir / kAuditFile);
  auto store = std::make_unique<VoStore>(VoRegistry::replay(log), dir);
  const Document snapshot = store->registry_.snapshot();
  bool stale = true;
  try {
    stale = read_document(dir / kSnapshotFile) != snapshot;
  } catch (const Error&) {
  }
  if (stale) write_document(dir / kSnapshotFile, snapshot);
  return store;
}

void VoStore::persist(const VoRegistry& next, std::size_t first_new_record) const {
  if (!dir_) return;
  if (next.audit_log().size() > first_new_record) {
    next.audit_log().append_to_file(*dir_ / kAuditFile, first_new_record);
  }
  write_document(*dir_ / kSnapshotFile, next.snapshot());
}

}  // namespace gridauth
