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

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gridauth {

/// Fully qualified attribute name:
///   /<vo>(/<group>)*(/Role=<role>)?(/Capability=<capability>)?
/// VO, group and role names match [A-Za-z0-9._-]+. Capabilities are free
/// text of at most 255 bytes without '/' or control characters.
class Fqan {
 public:
  static constexpr std::size_t kMaxCapabilityLength = 255;

  Fqan() = default;
  Fqan(std::string vo, std::vector<std::string> groups, std::optional<std::string> role = {},
       std::optional<std::string> capability = {});

  static Fqan parse(std::string_view text);
  static bool is_valid_name(std::string_view segment);

  std::string render() const;

  const std::string& vo() const { return vo_; }
  const std::vector<std::string>& groups() const { return groups_; }
  const std::optional<std::string>& role() const { return role_; }
  const std::optional<std::string>& capability() const { return capability_; }

  /// No role and no capability: a plain group membership.
  bool is_membership() const { return !role_ && !capability_; }
  /// The group part alone.
  Fqan group() const { return Fqan(vo_, groups_); }

  friend auto operator<=>(const Fqan&, const Fqan&) = default;

 private:
  std::string vo_;
  std::vector<std::string> groups_;
  std::optional<std::string> role_;
  std::optional<std::string> capability_;
};

/// An FQAN, optionally followed by "/*". A wildcard pattern P/* matches P
/// itself and every FQAN rendered below it (including its Role= and
/// Capability= forms); a plain pattern matches only the identical FQAN.
class FqanPattern {
 public:
  FqanPattern() = default;
  static FqanPattern parse(std::string_view text);

  bool matches(const Fqan& fqan) const;
  bool matches(std::string_view rendered) const;
  std::string render() const;
  bool wildcard() const { return wildcard_; }

  friend bool operator==(const FqanPattern&, const FqanPattern&) = default;

 private:
  std::string base_;
  bool wildcard_ = false;
};

}  // namespace gridauth
