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

#include "ftkit/subset.hpp"

#include <algorithm>
#include <unordered_set>

#include "ftkit/error.hpp"
#include "ftkit/rng.hpp"

namespace ftkit {

CategoryMap CategoryMap::from_sorted(std::vector<std::int64_t> ids) {
  CategoryMap m;
  m.selected_ids_ = std::move(ids);
  for (std::size_t i = 0; i < m.selected_ids_.size(); ++i) {
    m.label_of_[m.selected_ids_[i]] = static_cast<int>(i) + 1;
  }
  return m;
}

Json CategoryMap::to_json() const {
  Json labels = Json::object();
  for (std::int64_t id : selected_ids_) {
    labels[std::to_string(id)] = label_of_.at(id);
  }
  return {{"selected_ids", selected_ids_},
          {"labels", std::move(labels)},
          {"num_classes", num_classes()}};
}

CategoryMap CategoryMap::from_json(const Json& j) {
  if (!j.is_object() || !j.contains("selected_ids") ||
      !j["selected_ids"].is_array()) {
    throw SchemaError("category map needs a 'selected_ids' array");
  }
  std::vector<std::int64_t> ids;
  for (const auto& v : j["selected_ids"]) {
    ids.push_back(json_to_id(v, "selected_ids element"));
  }
  if (ids.empty() || !std::is_sorted(ids.begin(), ids.end()) ||
      std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw SchemaError("selected_ids must be non-empty, ascending and unique");
  }
  CategoryMap m = from_sorted(std::move(ids));
  if (j.contains("num_classes") &&
      json_to_id(j["num_classes"], "num_classes") != m.num_classes()) {
    throw SchemaError("num_classes does not equal the number of selected ids + 1");
  }
  if (j.contains("labels")) {
    if (!j["labels"].is_object() || j["labels"].size() != m.selected_ids_.size()) {
      throw SchemaError("labels must map every selected id");
    }
    for (const auto& [key, value] : j["labels"].items()) {
      auto it = m.label_of_.end();
      try {
        it = m.label_of_.find(std::stoll(key));
      } catch (const std::exception&) {
      }
      if (it == m.label_of_.end() || json_to_id(value, "label") != it->second) {
        throw SchemaError("labels entry '" + key +
                          "' disagrees with ascending id order");
      }
    }
  }
  return m;
}

CategoryMap make_category_map(const Dataset& d,
                              std::span<const std::int64_t> cat_ids) {
  if (cat_ids.empty()) {
    throw ConfigError("CAT_IDS is empty; select at least one category");
  }
  std::vector<std::int64_t> ids(cat_ids.begin(), cat_ids.end());
  std::sort(ids.begin(), ids.end());
  if (auto it = std::adjacent_find(ids.begin(), ids.end()); it != ids.end()) {
    throw ConfigError("CAT_IDS lists category id " + std::to_string(*it) +
                      " more than once");
  }
  for (std::int64_t id : ids) {
    if (!find_category(d, id)) {
      throw ConfigError("unknown category id " + std::to_string(id) +
                        "; run `list-categories` to see the valid ids");
    }
  }
  return CategoryMap::from_sorted(std::move(ids));
}

Json FilterReport::to_json() const {
  return {{"images_kept", images_kept},
          {"images_dropped", images_dropped},
          {"annotations_kept", annotations_kept},
          {"annotations_dropped", annotations_dropped}};
}

namespace {

std::unordered_set<std::int64_t> images_with_targets(const Dataset& d,
                                                     const CategoryMap& m) {
  std::unordered_set<std::int64_t> ids;
  for (const auto& a : d.annotations) {
    if (m.contains(a.category_id)) ids.insert(a.image_id);
  }
  return ids;
}

}  // namespace

FilterResult filter_dataset(const Dataset& d, const CategoryMap& m) {
  const auto keep = images_with_targets(d, m);
  FilterResult r;
  r.dataset.extra = d.extra;
  for (const auto& im : d.images) {
    if (keep.count(im.id)) r.dataset.images.push_back(im);
  }
  for (const auto& a : d.annotations) {
    if (m.contains(a.category_id) && keep.count(a.image_id)) {
      r.dataset.annotations.push_back(a);
    }
  }
  for (const auto& c : d.categories) {
    if (m.contains(c.id)) r.dataset.categories.push_back(c);
  }
  r.report.images_kept = r.dataset.images.size();
  r.report.images_dropped = d.images.size() - r.report.images_kept;
  r.report.annotations_kept = r.dataset.annotations.size();
  r.report.annotations_dropped = d.annotations.size() - r.report.annotations_kept;
  if (r.dataset.images.empty()) {
    throw EmptyResultError(
        "no image contains an annotation of the selected categories; "
        "refusing to write an empty training set");
  }
  return r;
}

std::vector<ImageRecord> eligible_images(const Dataset& d,
                                         const CategoryMap& m) {
  const auto keep = images_with_targets(d, m);
  std::vector<ImageRecord> out;
  for (const auto& im : d.images) {
    if (keep.count(im.id)) out.push_back(im);
  }
  return out;
}

std::vector<ImageRecord> select_demo_images(const Dataset& d,
                                            const CategoryMap& m, std::size_t n,
                                            std::uint64_t seed) {
  if (n == 0) throw Error(ErrorKind::kUsage, "demo image count must be >= 1");
  std::vector<ImageRecord> pool = eligible_images(d, m);
  if (pool.size() < n) {
    throw EmptyResultError("requested " + std::to_string(n) +
                           " demo images but only " +
                           std::to_string(pool.size()) + " eligible");
  }
  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = i + rng.below(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(n);
  return pool;
}

}  // namespace ftkit
