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

// Append-only, hash-chained audit log.
//
//   hash(r) = SHA-256(prev_hash(r) || canonical({action, actor, payload, seq, timestamp}))
//
// The genesis record chains from 32 zero bytes and sequence numbers are dense
// from 0. On disk the log is one canonical document per line, preceded by a
// header line naming the digest.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gridauth/canonical.h"
#include "gridauth/credential.h"
#include "gridauth/crypto.h"
#include "gridauth/subject.h"

namespace gridauth {

struct AuditRecord {
  std::uint64_t seq = 0;
  Timestamp timestamp = 0;
  SubjectName actor;
  std::string action;
  Document payload;
  Digest prev_hash{};
  Digest hash{};

  /// The hashed part: everything except prev_hash and hash.
  Document header_document() const;
  Document to_document() const;
  static AuditRecord from_document(const Document& doc);
};

Digest compute_record_hash(const Digest& prev_hash, const AuditRecord& record);

class AuditLog {
 public:
  const AuditRecord& append(Timestamp timestamp, const SubjectName& actor, std::string action,
                            Document payload);

  const std::vector<AuditRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  Digest head_hash() const;

  /// Records with seq >= since.
  std::vector<AuditRecord> since(std::uint64_t seq) const;

  static std::string encode_header();
  static std::string encode_record(const AuditRecord& record);
  std::string encode() const;
  /// Parses without verifying the chain. Throws kParseError.
  static AuditLog decode(std::string_view text);

  /// Appends records [first, end) to an existing log file (creating it with a
  /// header when absent) and fsyncs.
  void append_to_file(const std::filesystem::path& path, std::size_t first) const;
  static AuditLog load(const std::filesystem::path& path);

 private:
  std::vector<AuditRecord> records_;
};

/// Recomputes the chain from genesis; true iff every seq, prev_hash and hash
/// matches.
bool verify_audit_chain(std::span<const AuditRecord> records);
inline bool verify_audit_chain(const AuditLog& log) { return verify_audit_chain(log.records()); }
/// Decode + verify; false on any parse failure.
bool verify_encoded_audit_log(std::string_view text);

}  // namespace gridauth
