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


#include "gridauth/subject.h"

#include <algorithm>

#include "gridauth/error.h"

namespace gridauth {
namespace {

bool has_control(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) {
    auto u = static_cast<unsigned char>(c);
    return u < 0x20 || u == 0x7f;
  });
}

void check_component(const SubjectName::Component& c) {
  if (c.attribute.empty() || c.value.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "subject component with empty attribute or value");
  }
  if (c.attribute.find_first_of("/=") != std::string::npos || has_control(c.attribute)) {
    throw Error(ErrorCode::kInvalidArgument, "illegal character in subject attribute");
  }
  if (c.value.find('/') != std::string::npos || has_control(c.value)) {
    throw Error(ErrorCode::kInvalidArgument, "illegal character in subject value");
  }
}

}  // namespace

SubjectName::SubjectName(std::vector<Component> components) : components_(std::move(components)) {
  if (components_.empty()) throw Error(ErrorCode::kInvalidArgument, "empty subject name");
  for (const auto& c : components_) check_component(c);
}

SubjectName SubjectName::parse(std::string_view text) {
  if (text.empty() || text.front() != '/') {
    throw Error(ErrorCode::kParseError, "subject must start with '/': " + std::string(text));
  }
  std::vector<Component> out;
  std::size_t pos = 1;
  while (pos <= text.size()) {
    std::size_t next = text.find('/', pos);
    if (next == std::string_view::npos) next = text.size();
    std::string_view part = text.substr(pos, next - pos);
    std::size_t eq = part.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kParseError, "subject component without '=': " + std::string(text));
    }
    out.push_back({std::string(part.substr(0, eq)), std::string(part.substr(eq + 1))});
    pos = next + 1;
  }
  try {
    return SubjectName(std::move(out));
  } catch (const Error& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
}

std::string SubjectName::render() const {
  std::string out;
  for (const auto& c : components_) {
    out += '/';
    out += c.attribute;
    out += '=';
    out += c.value;
  }
  return out;
}

SubjectName SubjectName::with(std::string attribute, std::string value) const {
  auto components = components_;
  components.push_back({std::move(attribute), std::move(value)});
  return SubjectName(std::move(components));
}

bool SubjectName::extends_by_one(const SubjectName& prefix) const {
  if (components_.size() != prefix.components_.size() + 1) return false;
  return std::equal(prefix.components_.begin(), prefix.components_.end(), components_.begin());
}

}  // namespace gridauth
