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

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gridauth {

/// A distinguished name in slash form, e.g. "/C=IT/O=INFN/CN=Mario Rossi".
///
/// Attributes may not contain '/', '=' or control characters; values may not
/// contain '/' or control characters. Those restrictions make render/parse
/// an exact round-trip.
class SubjectName {
 public:
  struct Component {
    std::string attribute;
    std::string value;
    friend auto operator<=>(const Component&, const Component&) = default;
  };

  SubjectName() = default;
  explicit SubjectName(std::vector<Component> components);

  static SubjectName parse(std::string_view text);

  std::string render() const;
  const std::vector<Component>& components() const { return components_; }
  bool empty() const { return components_.empty(); }

  /// A copy with one more trailing component.
  SubjectName with(std::string attribute, std::string value) const;
  /// True iff this name equals `prefix` followed by exactly one component.
  bool extends_by_one(const SubjectName& prefix) const;

  friend auto operator<=>(const SubjectName&, const SubjectName&) = default;

 private:
  std::vector<Component> components_;
};

}  // namespace gridauth
