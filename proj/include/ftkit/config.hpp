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

#ifndef FTKIT_CONFIG_HPP_
#define FTKIT_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ftkit {

// Settings read from the experiment config. CAT_IDS is the single place the
// user names the categories; everything else is derived from it.
struct SubsetConfig {
  std::vector<std::int64_t> cat_ids;  // file order, duplicate-free
  std::uint64_t seed = 0;             // SEED
  std::size_t demo_count = 5;         // DEMO_COUNT
  // Unrecognized keys with their raw values, in file order. Indented blocks
  // under a bare `KEY:` line are kept verbatim (including newlines).
  std::vector<std::pair<std::string, std::string>> extra;

  bool operator==(const SubsetConfig&) const = default;
};

// Flat YAML subset: `KEY: scalar`, `KEY: [a, b, ...]`, comments, blank lines.
// Throws ConfigError carrying the 1-based line number.
SubsetConfig parse_config(std::string_view source);

// Inverse of parse_config for the supported keys.
std::string render_config(const SubsetConfig& c);

}  // namespace ftkit

#endif  // FTKIT_CONFIG_HPP_
