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

// Canonical document encoding. Every signed or hashed structure in the
// toolkit is reduced to a Document and serialized with canonical_serialize,
// so that two parties holding equal documents always hash equal bytes.
//
// Encoding rules:
//   * maps: keys sorted by code point (bytewise on UTF-8), `{"k":v,...}`
//   * arrays: order preserved, `[a,b]`
//   * strings: only `"` and `\` are escaped, everything else is raw UTF-8
//   * integers: base-10, no leading zeros, no "-0"
//   * booleans: `true` / `false`
//   * binary values: lowercase hex string
// Floats and null are rejected with ErrorCode::kUnsupportedValue.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace gridauth {

using Document = nlohmann::json;
using Bytes = std::vector<std::uint8_t>;

std::string canonical_serialize(const Document& doc);

/// Strict inverse of canonical_serialize: rejects whitespace, unsorted or
/// duplicate keys, non-canonical integers and unknown escapes, so that
/// canonical_serialize(canonical_parse(b)) == b for every accepted b.
Document canonical_parse(std::string_view text);

std::string to_hex(std::span<const std::uint8_t> bytes);
/// Lowercase hex only; uppercase digits are rejected.
Bytes from_hex(std::string_view hex);

Bytes to_bytes(std::string_view s);
std::string to_string(std::span<const std::uint8_t> bytes);

// Typed field access; each throws kParseError when the field is missing or
// of the wrong kind.
const Document& require_field(const Document& doc, std::string_view key);
std::string get_string(const Document& doc, std::string_view key);
std::uint64_t get_uint(const Document& doc, std::string_view key);
std::int64_t get_int(const Document& doc, std::string_view key);
bool get_bool(const Document& doc, std::string_view key);
Bytes get_hex(const Document& doc, std::string_view key);
const Document& get_array(const Document& doc, std::string_view key);
const Document& get_object(const Document& doc, std::string_view key);

// File helpers.
std::string read_file(const std::filesystem::path& path);
/// Writes via a sibling temp file and rename(2), so readers never observe a
/// partially written file. `mode` is applied to the temp file before rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view content,
                       unsigned mode = 0644);

/// Parses a canonical document file; one trailing newline is ignored.
Document read_document(const std::filesystem::path& path);
void write_document(const std::filesystem::path& path, const Document& doc,
                    unsigned mode = 0644);

}  // namespace gridauth
