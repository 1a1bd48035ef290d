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


#include "gridauth/canonical.h"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "gridauth/error.h"

namespace gridauth {
namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

void append_string(std::string& out, std::string_view s) {
  out.push_back('"');
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
}

void serialize_into(std::string& out, const Document& doc) {
  switch (doc.type()) {
    case Document::value_t::object: {
      // nlohmann::json's default object_t is a std::map<std::string, ...>,
      // which already iterates in bytewise key order.
      out.push_back('{');
      bool first = true;
      for (const auto& [key, value] : doc.items()) {
        if (!first) out.push_back(',');
        first = false;
        append_string(out, key);
        out.push_back(':');
        serialize_into(out, value);
      }
      out.push_back('}');
      return;
    }
    case Document::value_t::array: {
      out.push_back('[');
      bool first = true;
      for (const auto& value : doc) {
        if (!first) out.push_back(',');
        first = false;
        serialize_into(out, value);
      }
      out.push_back(']');
      return;
    }
    case Document::value_t::string:
      append_string(out, doc.get_ref<const std::string&>());
      return;
    case Document::value_t::boolean:
      out += doc.get<bool>() ? "true" : "false";
      return;
    case Document::value_t::number_integer:
      out += std::to_string(doc.get<std::int64_t>());
      return;
    case Document::value_t::number_unsigned:
      out += std::to_string(doc.get<std::uint64_t>());
      return;
    case Document::value_t::binary: {
      const auto& bin = doc.get_binary();
      append_string(out, to_hex(std::span<const std::uint8_t>(bin.data(), bin.size())));
      return;
    }
    case Document::value_t::null:
      throw Error(ErrorCode::kUnsupportedValue, "null is not representable");
    case Document::value_t::number_float:
      throw Error(ErrorCode::kUnsupportedValue, "floating point is not representable");
    case Document::value_t::discarded:
      throw Error(ErrorCode::kUnsupportedValue, "discarded value");
  }
  throw Error(ErrorCode::kUnsupportedValue, "unknown value kind");
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Document parse_document() {
    Document doc = parse_value(0);
    if (pos_ != text_.size()) fail("trailing bytes");
    return doc;
  }

 private:
  static constexpr int kMaxDepth = 64;

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::kParseError,
                "canonical parse error at offset " + std::to_string(pos_) + ": " + what);
  }

  char peek() const {
    if (pos_ >= text_.size()) fail("unexpected end of input");
    return text_[pos_];
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void expect_literal(std::string_view lit) {
    if (text_.substr(pos_, lit.size()) != lit) fail("bad literal");
    pos_ += lit.size();
  }

  Document parse_value(int depth) {
    if (depth > kMaxDepth) fail("nesting too deep");
    char c = peek();
    switch (c) {
      case '{': return parse_object(depth);
      case '[': return parse_array(depth);
      case '"': return Document(parse_string());
      case 't': expect_literal("true"); return Document(true);
      case 'f': expect_literal("false"); return Document(false);
      default:
        if (c == '-' || (c >= '0' && c <= '9')) return parse_integer();
        fail("unexpected character");
    }
  }

  Document parse_object(int depth) {
    expect('{');
    Document obj = Document::object();
    if (peek() == '}') {
      ++pos_;
      return obj;
    }
    std::string previous;
    bool first = true;
    while (true) {
      std::string key = parse_string();
      if (!first && !(previous < key)) fail("keys not strictly sorted");
      first = false;
      expect(':');
      obj[key] = parse_value(depth + 1);
      previous = std::move(key);
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      expect('}');
      return obj;
    }
  }

  Document parse_array(int depth) {
    expect('[');
    Document arr = Document::array();
    if (peek() == ']') {
      ++pos_;
      return arr;
    }
    while (true) {
      arr.push_back(parse_value(depth + 1));
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      expect(']');
      return arr;
    }
  }

  std::string parse_string() {
    expect('"');
    std::string out;
    while (true) {
      char c = peek();
      ++pos_;
      if (c == '"') return out;
      if (c == '\\') {
        char e = peek();
        if (e != '"' && e != '\\') fail("invalid escape");
        ++pos_;
        out.push_back(e);
        continue;
      }
      out.push_back(c);
    }
  }

  Document parse_integer() {
    std::size_t start = pos_;
    bool negative = false;
    if (peek() == '-') {
      negative = true;
      ++pos_;
    }
    std::size_t digits_start = pos_;
    while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') ++pos_;
    std::string_view digits = text_.substr(digits_start, pos_ - digits_start);
    if (digits.empty()) fail("missing digits");
    if (digits.size() > 1 && digits[0] == '0') fail("leading zero");
    if (negative && digits == "0") fail("negative zero");
    std::string_view whole = text_.substr(start, pos_ - start);
    if (negative) {
      std::int64_t v = 0;
      auto [ptr, ec] = std::from_chars(whole.data(), whole.data() + whole.size(), v);
      if (ec != std::errc() || ptr != whole.data() + whole.size()) fail("integer out of range");
      return Document(v);
    }
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
    if (ec != std::errc() || ptr != digits.data() + digits.size()) fail("integer out of range");
    return Document(v);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

[[noreturn]] void field_error(std::string_view key, const char* what) {
  throw Error(ErrorCode::kParseError, "field '" + std::string(key) + "': " + what);
}

}  // namespace

std::string canonical_serialize(const Document& doc) {
  std::string out;
  serialize_into(out, doc);
  return out;
}

Document canonical_parse(std::string_view text) { return Parser(text).parse_document(); }

std::string to_hex(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(kHexDigits[b >> 4]);
    out.push_back(kHexDigits[b & 0x0f]);
  }
  return out;
}

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw Error(ErrorCode::kParseError, "odd-length hex string");
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = hex_value(hex[2 * i]);
    int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw Error(ErrorCode::kParseError, "invalid hex digit");
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }

std::string to_string(std::span<const std::uint8_t> bytes) {
  return std::string(bytes.begin(), bytes.end());
}

const Document& require_field(const Document& doc, std::string_view key) {
  if (!doc.is_object()) throw Error(ErrorCode::kParseError, "expected an object");
  auto it = doc.find(key);
  if (it == doc.end()) field_error(key, "missing");
  return *it;
}

std::string get_string(const Document& doc, std::string_view key) {
  const Document& v = require_field(doc, key);
  if (!v.is_string()) field_error(key, "expected string");
  return v.get<std::string>();
}

std::uint64_t get_uint(const Document& doc, std::string_view key) {
  const Document& v = require_field(doc, key);
  if (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  if (!v.is_number_unsigned()) field_error(key, "expected non-negative integer");
  return v.get<std::uint64_t>();
}

std::int64_t get_int(const Document& doc, std::string_view key) {
  const Document& v = require_field(doc, key);
  if (v.is_number_unsigned()) {
    auto u = v.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(INT64_MAX)) field_error(key, "integer out of range");
    return static_cast<std::int64_t>(u);
  }
  if (!v.is_number_integer()) field_error(key, "expected integer");
  return v.get<std::int64_t>();
}

bool get_bool(const Document& doc, std::string_view key) {
  const Document& v = require_field(doc, key);
  if (!v.is_boolean()) field_error(key, "expected boolean");
  return v.get<bool>();
}

Bytes get_hex(const Document& doc, std::string_view key) { return from_hex(get_string(doc, key)); }

const Document& get_array(const Document& doc, std::string_view key) {
  const Document& v = require_field(doc, key);
  if (!v.is_array()) field_error(key, "expected array");
  return v;
}

const Document& get_object(const Document& doc, std::string_view key) {
  const Document& v = require_field(doc, key);
  if (!v.is_object()) field_error(key, "expected object");
  return v;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content,
                       unsigned mode) {
  std::filesystem::path tmp = path;
  static std::atomic<std::uint64_t> counter{0};
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter.fetch_add(1));
  int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_EXCL | O_CLOEXEC, mode);
  if (fd < 0) {
    throw Error(ErrorCode::kIoError, "cannot create " + tmp.string() + ": " + std::strerror(errno));
  }
  ::fchmod(fd, mode);
  std::size_t written = 0;
  while (written < content.size()) {
    ssize_t n = ::write(fd, content.data() + written, content.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      int err = errno;
      ::close(fd);
      ::unlink(tmp.c_str());
      throw Error(ErrorCode::kIoError, "write failed: " + std::string(std::strerror(err)));
    }
    written += static_cast<std::size_t>(n);
  }
  ::fsync(fd);
  ::close(fd);
  if (::rename(tmp.c_str(), path.c_str()) != 0) {
    int err = errno;
    ::unlink(tmp.c_str());
    throw Error(ErrorCode::kIoError,
                "rename to " + path.string() + " failed: " + std::strerror(err));
  }
}

Document read_document(const std::filesystem::path& path) {
  std::string text = read_file(path);
  // Hand-edited files usually end in a newline; tolerate exactly one.
  if (!text.empty() && text.back() == '\n') text.pop_back();
  return canonical_parse(text);
}

void write_document(const std::filesystem::path& path, const Document& doc, unsigned mode) {
  write_file_atomic(path, canonical_serialize(doc), mode);
}

}  // namespace gridauth
