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

#ifndef FTKIT_SUBSET_HPP_
#define FTKIT_SUBSET_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ftkit/coco.hpp"

namespace ftkit {

// Selected original category ids mapped to contiguous training labels 1..K.
// Label 0 is the background class, so num_classes = K + 1.
class CategoryMap {
 public:
  const std::vector<std::int64_t>& selected_ids() const { return selected_ids_; }
  const std::map<std::int64_t, int>& labels() const { return label_of_; }
  int num_classes() const { return static_cast<int>(selected_ids_.size()) + 1; }
  int k() const { return static_cast<int>(selected_ids_.size()); }

  bool contains(std::int64_t category_id) const {
    return label_of_.count(category_id) != 0;
  }
  // Throws std::out_of_range for ids outside the subset.
  int label_of(std::int64_t category_id) const {
    return label_of_.at(category_id);
  }

  // `{"selected_ids":[...],"labels":{"id":label,...},"num_classes":N}`
  Json to_json() const;
  static CategoryMap from_json(const Json& j);

  bool operator==(const CategoryMap&) const = default;

 private:
  friend CategoryMap make_category_map(const Dataset&,
                                       std::span<const std::int64_t>);
  static CategoryMap from_sorted(std::vector<std::int64_t> ids);

  std::vector<std::int64_t> selected_ids_;
  std::map<std::int64_t, int> label_of_;
};

// Throws ConfigError for an empty list, duplicates or ids the dataset lacks.
CategoryMap make_category_map(const Dataset& d,
                              std::span<const std::int64_t> cat_ids);

struct FilterReport {
  std::size_t images_kept = 0;
  std::size_t images_dropped = 0;
  std::size_t annotations_kept = 0;
  std::size_t annotations_dropped = 0;

  Json to_json() const;
  bool operator==(const FilterReport&) const = default;
};

struct FilterResult {
  Dataset dataset;
  FilterReport report;
};

// Keeps images with at least one in-subset annotation (crowd annotations
// count), the in-subset annotations on them, and the selected categories.
// Original category ids are kept. Throws EmptyResultError if no image
// survives.
FilterResult filter_dataset(const Dataset& d, const CategoryMap& m);

// Images with at least one in-subset annotation, in dataset order.
std::vector<ImageRecord> eligible_images(const Dataset& d, const CategoryMap& m);

// `n` distinct images drawn uniformly without replacement from the eligible
// set with SplitMix64(seed) and a partial Fisher-Yates shuffle. Returned in
// draw order. Throws EmptyResultError if fewer than `n` are eligible.
std::vector<ImageRecord> select_demo_images(const Dataset& d,
                                            const CategoryMap& m, std::size_t n,
                                            std::uint64_t seed);

}  // namespace ftkit

#endif  // FTKIT_SUBSET_HPP_
