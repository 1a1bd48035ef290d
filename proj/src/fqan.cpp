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


#include "gridauth/fqan.h"

#include <algorithm>

#include "gridauth/error.h"

namespace gridauth {
namespace {

constexpr std::string_view kRolePrefix = "Role=";
constexpr std::string_view kCapabilityPrefix = "Capability=";

bool valid_capability(std::string_view cap) {
  if (cap.empty() || cap.size() > Fqan::kMaxCapabilityLength) return false;
  return std::none_of(cap.begin(), cap.end(), [](char c) {
    auto u = static_cast<unsigned char>(c);
    return c == '/' || u < 0x20 || u == 0x7f;
  });
}

std::vector<std::string_view> split_slashes(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t pos = 1;
  while (pos <= text.size()) {
    std::size_t next = text.find('/', pos);
    if (next == std::string_view::npos) next = text.size();
    parts.push_back(text.substr(pos, next - pos));
    pos = next + 1;
  }
  return parts;
}

}  // namespace

bool Fqan::is_valid_name(std::string_view segment) {
  if (segment.empty()) return false;
  return std::all_of(segment.begin(), segment.end(), [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
           c == '.' || c == '_' || c == '-';
  });
}

Fqan::Fqan(std::string vo, std::vector<std::string> groups, std::optional<std::string> role,
           std::optional<std::string> capability)
    : vo_(std::move(vo)),
      groups_(std::move(groups)),
      role_(std::move(role)),
      capability_(std::move(capability)) {
  if (!is_valid_name(vo_)) throw Error(ErrorCode::kInvalidArgument, "invalid VO name '" + vo_ + "'");
  for (const auto& g : groups_) {
    if (!is_valid_name(g)) throw Error(ErrorCode::kInvalidArgument, "invalid group name '" + g + "'");
  }
  if (role_ && !is_valid_name(*role_)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid role name '" + *role_ + "'");
  }
  if (capability_ && !valid_capability(*capability_)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid capability");
  }
}

Fqan Fqan::parse(std::string_view text) {
  if (text.size() < 2 || text.front() != '/') {
    throw Error(ErrorCode::kParseError, "FQAN must start with '/': " + std::string(text));
  }
  auto parts = split_slashes(text);
  std::string vo(parts.front());
  std::vector<std::string> groups;
  std::optional<std::string> role;
  std::optional<std::string> capability;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    std::string_view p = parts[i];
    if (p.starts_with(kCapabilityPrefix)) {
      if (i + 1 != parts.size()) {
        throw Error(ErrorCode::kParseError, "Capability must be the last FQAN component");
      }
      capability = std::string(p.substr(kCapabilityPrefix.size()));
    } else if (p.starts_with(kRolePrefix)) {
      if (role || capability) throw Error(ErrorCode::kParseError, "misplaced Role in FQAN");
      role = std::string(p.substr(kRolePrefix.size()));
    } else {
      if (role) throw Error(ErrorCode::kParseError, "group segment after Role in FQAN");
      groups.emplace_back(p);
    }
  }
  try {
    return Fqan(std::move(vo), std::move(groups), std::move(role), std::move(capability));
  } catch (const Error& e) {
    throw Error(ErrorCode::kParseError, std::string(e.what()) + " in '" + std::string(text) + "'");
  }
}

std::string Fqan::render() const {
  std::string out = "/" + vo_;
  for (const auto& g : groups_) out += "/" + g;
  if (role_) out += "/Role=" + *role_;
  if (capability_) out += "/Capability=" + *capability_;
  return out;
}

FqanPattern FqanPattern::parse(std::string_view text) {
  FqanPattern p;
  if (text.ends_with("/*")) {
    p.wildcard_ = true;
    text.remove_suffix(2);
  }
  p.base_ = Fqan::parse(text).render();
  return p;
}

bool FqanPattern::matches(std::string_view rendered) const {
  if (rendered == base_) return true;
  return wildcard_ && rendered.size() > base_.size() && rendered.starts_with(base_) &&
         rendered[base_.size()] == '/';
}

bool FqanPattern::matches(const Fqan& fqan) const { return matches(fqan.render()); }

std::string FqanPattern::render() const { return wildcard_ ? base_ + "/*" : base_; }

}  // namespace gridauth
