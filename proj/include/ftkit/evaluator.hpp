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

#ifndef FTKIT_EVALUATOR_HPP_
#define FTKIT_EVALUATOR_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ftkit/coco.hpp"
#include "ftkit/subset.hpp"

namespace ftkit {

// COCO detection protocol: ten IoU thresholds 0.50:0.05:0.95, 101 recall
// points, at most 100 detections per image and category, area range "all".
inline constexpr std::size_t kNumThresholds = 10;
inline constexpr std::array<double, kNumThresholds> kIouThresholds = {
    0.50, 0.55, 0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95};
inline constexpr int kRecallPoints = 101;
inline constexpr std::size_t kMaxDetections = 100;

struct Detection {
  std::int64_t image_id = 0;
  std::int64_t category_id = 0;
  BBox bbox;
  double score = 0;

  bool operator==(const Detection&) const = default;
};

// COCO results format: `[{"image_id", "category_id", "bbox", "score"}, ...]`.
// Boxes must have w > 0 and h > 0 and scores must be finite.
std::vector<Detection> parse_detections(std::string_view source);
std::string serialize_detections(std::span<const Detection> dets);

// Intersection over union. Throws ContractViolation for degenerate boxes.
double iou(const BBox& a, const BBox& b);
// Intersection over the detection's own area, used against crowd regions.
double crowd_overlap(const BBox& det, const BBox& crowd);

enum class Outcome { kTruePositive, kFalsePositive, kIgnored };

struct GroundTruthBox {
  BBox bbox;
  bool iscrowd = false;
};

struct MatchResult {
  std::vector<Outcome> outcomes;  // parallel to the detections
  std::vector<bool> gt_matched;   // parallel to the ground truth
};

// Greedy matching for one image and category. `dets` must already be in
// descending score order. Each detection takes the unmatched non-crowd box
// with the highest IoU >= threshold (ties go to the later box, as in the
// reference COCO tooling); failing that it is ignored when a crowd region
// covers it by at least `threshold`, else it is a false positive.
MatchResult match_category(std::span<const GroundTruthBox> gt,
                           std::span<const BBox> dets, double threshold);

// 101-point interpolated AP over outcomes pooled across images in descending
// score order. kIgnored entries are skipped. Returns nullopt when
// gt_count == 0.
std::optional<double> average_precision(std::span<const Outcome> outcomes,
                                        std::size_t gt_count);

struct CategoryEval {
  std::int64_t id = 0;
  std::string name;
  int label = 0;
  std::size_t num_gt = 0;     // non-crowd ground truth
  std::size_t num_crowd = 0;
  std::size_t num_detections = 0;
  std::array<std::optional<double>, kNumThresholds> ap_per_threshold{};
  std::optional<double> ap;   // mean over defined thresholds
};

struct EvalReport {
  std::vector<CategoryEval> categories;  // ascending id
  // Unweighted mean over categories with at least one non-crowd box.
  std::optional<double> mean_ap;

  Json to_json() const;
  std::string summary_table() const;
};

// Scores `dets` against `gt` for every category in `m`. Throws IntegrityError
// for detections that reference unknown images or categories and SchemaError
// for degenerate boxes (detections, or ground truth of a scored category).
EvalReport evaluate(const Dataset& gt, std::span<const Detection> dets,
                    const CategoryMap& m);

}  // namespace ftkit

#endif  // FTKIT_EVALUATOR_HPP_
