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


#include "gridauth/gridmap.h"

#include <algorithm>
#include <set>

#include "gridauth/canonical.h"
#include "gridauth/error.h"
#include "gridauth/transport.h"

namespace gridauth {
namespace {

Error config_error(int line, const std::string& message) {
  return Error(ErrorCode::kMalformedConfig, "line " + std::to_string(line) + ": " + message);
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    auto nl = text.find('\n');
    lines.push_back(text.substr(0, nl));
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return lines;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

// Whitespace-separated tokens; a token may be double-quoted to hold spaces.
std::vector<std::string> tokenize(std::string_view line, int line_no) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    if (line[i] == ' ' || line[i] == '\t' || line[i] == '\r') {
      ++i;
      continue;
    }
    if (line[i] == '#') break;
    if (line[i] == '"') {
      auto close = line.find('"', i + 1);
      if (close == std::string_view::npos) throw config_error(line_no, "unterminated quote");
      tokens.emplace_back(line.substr(i + 1, close - i - 1));
      i = close + 1;
      if (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') {
        throw config_error(line_no, "text directly after a quoted token");
      }
      continue;
    }
    std::size_t end = i;
    while (end < line.size() && line[end] != ' ' && line[end] != '\t' && line[end] != '\r') ++end;
    tokens.emplace_back(line.substr(i, end - i));
    i = end;
  }
  return tokens;
}

SubjectName parse_subject(const std::string& text, int line_no) {
  try {
    return SubjectName::parse(text);
  } catch (const Error& e) {
    throw config_error(line_no, e.what());
  }
}

}  // namespace

bool is_valid_account_name(std::string_view name) {
  return Fqan::is_valid_name(name) && name.front() != '.';
}

bool is_valid_gridmap_target(std::string_view target) {
  if (!target.empty() && target.front() == '.') target.remove_prefix(1);
  return is_valid_account_name(target);
}

GridMapfile GridMapfile::parse(std::string_view text) {
  GridMapfile out;
  int line_no = 0;
  for (std::string_view raw : split_lines(text)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    std::string subject_text;
    std::string_view rest;
    if (line.front() == '"') {
      auto close = line.rfind('"');
      if (close == 0) throw config_error(line_no, "unterminated quote");
      subject_text = std::string(line.substr(1, close - 1));
      rest = line.substr(close + 1);
      if (rest.empty() || (rest.front() != ' ' && rest.front() != '\t')) {
        throw config_error(line_no, "missing target");
      }
    } else {
      auto space = line.find_first_of(" \t");
      if (space == std::string_view::npos) throw config_error(line_no, "missing target");
      subject_text = std::string(line.substr(0, space));
      rest = line.substr(space);
    }
    std::string target(trim(rest));
    if (!is_valid_gridmap_target(target)) {
      throw config_error(line_no, "invalid target '" + target + "'");
    }
    SubjectName subject = parse_subject(subject_text, line_no);
    if (!out.add(subject, target)) {
      throw config_error(line_no, "duplicate subject " + subject.render());
    }
  }
  return out;
}

GridMapfile GridMapfile::load(const std::filesystem::path& path) { return parse(read_file(path)); }

bool GridMapfile::add(const SubjectName& subject, const std::string& target) {
  if (!is_valid_gridmap_target(target)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid grid-mapfile target '" + target + "'");
  }
  const std::string key = subject.render();
  auto it = std::lower_bound(entries_.begin(), entries_.end(), key,
                             [](const GridMapEntry& e, const std::string& k) {
                               return e.subject.render() < k;
                             });
  if (it != entries_.end() && it->subject.render() == key) return false;
  entries_.insert(it, GridMapEntry{subject, target});
  return true;
}

bool GridMapfile::remove(const SubjectName& subject) {
  auto it = std::find_if(entries_.begin(), entries_.end(),
                         [&](const GridMapEntry& e) { return e.subject == subject; });
  if (it == entries_.end()) return false;
  entries_.erase(it);
  return true;
}

const GridMapEntry* GridMapfile::find(const SubjectName& subject) const {
  for (const auto& e : entries_) {
    if (e.subject == subject) return &e;
  }
  return nullptr;
}

std::string GridMapfile::emit() const {
  std::string out;
  for (const auto& e : entries_) {
    out += '"';
    out += e.subject.render();
    out += "\" ";
    out += e.target;
    out += '\n';
  }
  return out;
}

MkgridmapConfig MkgridmapConfig::parse(std::string_view text) {
  MkgridmapConfig config;
  int line_no = 0;
  for (std::string_view line : split_lines(text)) {
    ++line_no;
    std::vector<std::string> t = tokenize(line, line_no);
    if (t.empty()) continue;
    MkgridmapDirective d;
    d.line = line_no;
    if (t[0] == "group") {
      if (t.size() != 4) throw config_error(line_no, "usage: group <endpoint> <vo-or-fqan> <target>");
      d.kind = MkgridmapDirective::Kind::kGroup;
      d.endpoint = t[1];
      try {
        parse_endpoint(d.endpoint);
        d.selector = t[2].front() == '/' ? Fqan::parse(t[2]) : Fqan(t[2], {});
      } catch (const Error& e) {
        throw config_error(line_no, e.what());
      }
      d.target = t[3];
    } else if (t[0] == "auth") {
      if (t.size() != 3) throw config_error(line_no, "usage: auth \"<subject>\" <target>");
      d.kind = MkgridmapDirective::Kind::kAuth;
      d.subject = parse_subject(t[1], line_no);
      d.target = t[2];
    } else if (t[0] == "deny") {
      if (t.size() != 2) throw config_error(line_no, "usage: deny \"<subject>\"");
      d.kind = MkgridmapDirective::Kind::kDeny;
      d.subject = parse_subject(t[1], line_no);
    } else {
      throw config_error(line_no, "unknown directive '" + t[0] + "'");
    }
    if (d.kind != MkgridmapDirective::Kind::kDeny && !is_valid_gridmap_target(d.target)) {
      throw config_error(line_no, "invalid target '" + d.target + "'");
    }
    config.directives.push_back(std::move(d));
  }
  return config;
}

MkgridmapConfig MkgridmapConfig::load(const std::filesystem::path& path) {
  return parse(read_file(path));
}

GridMapfile mkgridmap_generate(const MkgridmapConfig& config, const UserListFetcher& fetcher,
                               Timestamp now) {
  std::set<SubjectName> denied;
  for (const auto& d : config.directives) {
    if (d.kind == MkgridmapDirective::Kind::kDeny) denied.insert(d.subject);
  }
  GridMapfile out;
  for (const auto& d : config.directives) {
    switch (d.kind) {
      case MkgridmapDirective::Kind::kGroup: {
        std::vector<SubjectName> members;
        try {
          members = fetcher(d.endpoint, *d.selector, now);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kTransportError) throw;
          throw Error(ErrorCode::kEndpointUnreachable, d.endpoint + ": " + e.what(), {d.endpoint});
        }
        for (const auto& m : members) {
          if (!denied.count(m)) out.add(m, d.target);
        }
        break;
      }
      case MkgridmapDirective::Kind::kAuth:
        if (!denied.count(d.subject)) out.add(d.subject, d.target);
        break;
      case MkgridmapDirective::Kind::kDeny:
        break;
    }
  }
  return out;
}

}  // namespace gridauth
