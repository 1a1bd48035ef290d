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


#include "gridauth/audit.h"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <filesystem>

#include "gridauth/error.h"

namespace gridauth {
namespace {

constexpr std::string_view kFormat = "gridauth-audit/1";

Digest digest_from_hex(const Document& doc, std::string_view key) {
  Bytes b = get_hex(doc, key);
  if (b.size() != 32) throw Error(ErrorCode::kParseError, "digest must be 32 bytes");
  Digest d{};
  std::copy(b.begin(), b.end(), d.begin());
  return d;
}

}  // namespace

Document AuditRecord::header_document() const {
  return Document{{"seq", seq},
                  {"timestamp", timestamp},
                  {"actor", actor.render()},
                  {"action", action},
                  {"payload", payload}};
}

Document AuditRecord::to_document() const {
  Document doc = header_document();
  doc["prev_hash"] = to_hex(prev_hash);
  doc["hash"] = to_hex(hash);
  return doc;
}

AuditRecord AuditRecord::from_document(const Document& doc) {
  if (doc.size() != 7) throw Error(ErrorCode::kParseError, "unexpected field set in audit record");
  AuditRecord r;
  r.seq = get_uint(doc, "seq");
  r.timestamp = get_int(doc, "timestamp");
  r.actor = SubjectName::parse(get_string(doc, "actor"));
  r.action = get_string(doc, "action");
  r.payload = require_field(doc, "payload");
  r.prev_hash = digest_from_hex(doc, "prev_hash");
  r.hash = digest_from_hex(doc, "hash");
  return r;
}

Digest compute_record_hash(const Digest& prev_hash, const AuditRecord& record) {
  std::string material(prev_hash.begin(), prev_hash.end());
  material += canonical_serialize(record.header_document());
  return sha256(material);
}

const AuditRecord& AuditLog::append(Timestamp timestamp, const SubjectName& actor,
                                    std::string action, Document payload) {
  AuditRecord r;
  r.seq = records_.size();
  r.timestamp = timestamp;
  r.actor = actor;
  r.action = std::move(action);
  r.payload = std::move(payload);
  r.prev_hash = head_hash();
  r.hash = compute_record_hash(r.prev_hash, r);
  records_.push_back(std::move(r));
  return records_.back();
}

Digest AuditLog::head_hash() const { return records_.empty() ? Digest{} : records_.back().hash; }

std::vector<AuditRecord> AuditLog::since(std::uint64_t seq) const {
  if (seq >= records_.size()) return {};
  return std::vector<AuditRecord>(records_.begin() + static_cast<std::ptrdiff_t>(seq),
                                  records_.end());
}

std::string AuditLog::encode_header() {
  return canonical_serialize(
             Document{{"digest", std::string(kDigestName)}, {"format", std::string(kFormat)}}) +
         "\n";
}

std::string AuditLog::encode_record(const AuditRecord& record) {
  return canonical_serialize(record.to_document()) + "\n";
}

std::string AuditLog::encode() const {
  std::string out = encode_header();
  for (const auto& r : records_) out += encode_record(r);
  return out;
}

AuditLog AuditLog::decode(std::string_view text) {
  AuditLog log;
  bool header_seen = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) throw Error(ErrorCode::kParseError, "unterminated audit line");
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    Document doc = canonical_parse(line);
    if (!header_seen) {
      if (doc.size() != 2 || get_string(doc, "digest") != kDigestName ||
          get_string(doc, "format") != kFormat) {
        throw Error(ErrorCode::kParseError, "unsupported audit log header");
      }
      header_seen = true;
      continue;
    }
    log.records_.push_back(AuditRecord::from_document(doc));
  }
  if (!header_seen) throw Error(ErrorCode::kParseError, "missing audit log header");
  return log;
}

void AuditLog::append_to_file(const std::filesystem::path& path, std::size_t first) const {
  std::string chunk;
  bool fresh = !std::filesystem::exists(path);
  if (fresh) chunk = encode_header();
  for (std::size_t i = first; i < records_.size(); ++i) chunk += encode_record(records_[i]);
  int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd < 0) {
    throw Error(ErrorCode::kIoError, "cannot open " + path.string() + ": " + std::strerror(errno));
  }
  std::size_t written = 0;
  while (written < chunk.size()) {
    ssize_t n = ::write(fd, chunk.data() + written, chunk.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      int err = errno;
      ::close(fd);
      throw Error(ErrorCode::kIoError, "audit append failed: " + std::string(std::strerror(err)));
    }
    written += static_cast<std::size_t>(n);
  }
  ::fsync(fd);
  ::close(fd);
}

AuditLog AuditLog::load(const std::filesystem::path& path) { return decode(read_file(path)); }

bool verify_audit_chain(std::span<const AuditRecord> records) {
  Digest prev{};
  for (std::size_t i = 0; i < records.size(); ++i) {
    const AuditRecord& r = records[i];
    if (r.seq != i || r.prev_hash != prev) return false;
    if (compute_record_hash(prev, r) != r.hash) return false;
    prev = r.hash;
  }
  return true;
}

bool verify_encoded_audit_log(std::string_view text) {
  try {
    return verify_audit_chain(AuditLog::decode(text));
  } catch (const Error&) {
    return false;
  }
}

}  // namespace gridauth
