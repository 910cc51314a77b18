// Copyright 2026 The ftkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ftkit/config.hpp"

#include <algorithm>
#include <charconv>
#include <optional>
#include <set>

#include "ftkit/error.hpp"

namespace ftkit {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

// Drops a YAML comment: `#` at line start or after whitespace, outside quotes.
std::string_view strip_comment(std::string_view line) {
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '#' && (i == 0 || line[i - 1] == ' ' || line[i - 1] == '\t')) {
      return line.substr(0, i);
    }
  }
  return line;
}

template <typename T>
std::optional<T> parse_int(std::string_view s) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) {
    return std::nullopt;
  }
  return v;
}

bool is_key(std::string_view k) {
  if (k.empty()) return false;
  auto ok_start = [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
  };
  return ok_start(k[0]) && std::all_of(k.begin(), k.end(), [&](char c) {
           return ok_start(c) || (c >= '0' && c <= '9') || c == '.' || c == '-';
         });
}

std::vector<std::int64_t> parse_cat_ids(std::string_view value, int line) {
  std::vector<std::int64_t> ids;
  auto add = [&](std::string_view item) {
    item = trim(item);
    auto id = parse_int<std::int64_t>(item);
    if (!id) {
      throw ConfigError("line " + std::to_string(line) + ": CAT_IDS element '" +
                            std::string(item) + "' is not an integer",
                        line);
    }
    if (*id < 1) {
      throw ConfigError("line " + std::to_string(line) + ": CAT_IDS element " +
                            std::to_string(*id) + " must be >= 1",
                        line);
    }
    if (std::find(ids.begin(), ids.end(), *id) != ids.end()) {
      throw ConfigError("line " + std::to_string(line) + ": CAT_IDS lists " +
                            std::to_string(*id) + " more than once",
                        line);
    }
    ids.push_back(*id);
  };

  if (value.empty()) {
    throw ConfigError("line " + std::to_string(line) + ": CAT_IDS has no value",
                      line);
  }
  if (value.front() != '[') {
    add(value);
    return ids;
  }
  if (value.back() != ']') {
    throw ConfigError(
        "line " + std::to_string(line) + ": CAT_IDS list is missing ']'", line);
  }
  std::string_view body = trim(value.substr(1, value.size() - 2));
  if (body.empty()) {
    throw ConfigError("line " + std::to_string(line) +
                          ": CAT_IDS is empty; select at least one category",
                      line);
  }
  while (true) {
    std::size_t comma = body.find(',');
    add(body.substr(0, comma));
    if (comma == std::string_view::npos) break;
    body.remove_prefix(comma + 1);
  }
  return ids;
}

}  // namespace

SubsetConfig parse_config(std::string_view source) {
  std::vector<std::string_view> lines;
  for (std::size_t start = 0; start <= source.size();) {
    std::size_t nl = source.find('\n', start);
    if (nl == std::string_view::npos) nl = source.size();
    std::string_view l = source.substr(start, nl - start);
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
    lines.push_back(l);
    start = nl + 1;
  }

  SubsetConfig c;
  bool have_cat_ids = false;
  std::set<std::string, std::less<>> seen;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int line_no = static_cast<int>(i) + 1;
    std::string_view content = trim(strip_comment(lines[i]));
    if (content.empty()) continue;
    if (lines[i].front() == ' ' || lines[i].front() == '\t') {
      throw ConfigError("line " + std::to_string(line_no) +
                            ": unexpected indentation (nested blocks must "
                            "follow a bare 'KEY:' line)",
                        line_no);
    }
    std::size_t colon = content.find(':');
    if (colon == std::string_view::npos) {
      throw ConfigError(
          "line " + std::to_string(line_no) + ": expected 'KEY: value'", line_no);
    }
    std::string_view key = trim(content.substr(0, colon));
    std::string_view value = trim(content.substr(colon + 1));
    if (!is_key(key)) {
      throw ConfigError("line " + std::to_string(line_no) + ": invalid key '" +
                            std::string(key) + "'",
                        line_no);
    }
    if (!seen.insert(std::string(key)).second) {
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" +
                            std::string(key) + "'",
                        line_no);
    }

    if (key == "CAT_IDS") {
      c.cat_ids = parse_cat_ids(value, line_no);
      have_cat_ids = true;
    } else if (key == "SEED") {
      auto v = parse_int<std::uint64_t>(value);
      if (!v) {
        throw ConfigError("line " + std::to_string(line_no) +
                              ": SEED must be a non-negative 64-bit integer",
                          line_no);
      }
      c.seed = *v;
    } else if (key == "DEMO_COUNT") {
      auto v = parse_int<std::size_t>(value);
      if (!v || *v == 0) {
        throw ConfigError(
            "line " + std::to_string(line_no) + ": DEMO_COUNT must be >= 1",
            line_no);
      }
      c.demo_count = *v;
    } else if (value.empty()) {
      // Opaque nested block: keep the indented lines that follow verbatim.
      std::string block;
      std::size_t last = i;
      for (std::size_t j = i + 1; j < lines.size(); ++j) {
        std::string_view l = lines[j];
        bool blank = trim(strip_comment(l)).empty();
        bool indented = !l.empty() && (l.front() == ' ' || l.front() == '\t');
        if (!blank && !indented) break;
        if (indented) last = j;
      }
      for (std::size_t j = i + 1; j <= last; ++j) {
        block += '\n';
        block += lines[j];
      }
      c.extra.emplace_back(std::string(key), std::move(block));
      i = last;
    } else {
      c.extra.emplace_back(std::string(key), std::string(value));
    }
  }
  if (!have_cat_ids) {
    throw ConfigError(
        "missing required keyword CAT_IDS (e.g. 'CAT_IDS: [1, 3]')");
  }
  return c;
}

std::string render_config(const SubsetConfig& c) {
  std::string out = "CAT_IDS: [";
  for (std::size_t i = 0; i < c.cat_ids.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(c.cat_ids[i]);
  }
  out += "]\nSEED: " + std::to_string(c.seed) +
         "\nDEMO_COUNT: " + std::to_string(c.demo_count) + "\n";
  for (const auto& [key, value] : c.extra) {
    out += key + ":";
    if (!value.empty() && value.front() != '\n') out += " ";
    out += value + "\n";
  }
  return out;
}

}  // namespace ftkit
