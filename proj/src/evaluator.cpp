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

#include "ftkit/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "ftkit/error.hpp"

namespace ftkit {
namespace {

void require_proper(const BBox& b) {
  if (!(b.w > 0 && b.h > 0) || !std::isfinite(b.x) || !std::isfinite(b.y) ||
      !std::isfinite(b.w) || !std::isfinite(b.h)) {
    throw ContractViolation("box must be finite with w > 0 and h > 0");
  }
}

double intersection(const BBox& a, const BBox& b) {
  double iw = std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x);
  double ih = std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y);
  return iw > 0 && ih > 0 ? iw * ih : 0.0;
}

// A detection together with its position in the caller's list, which breaks
// score ties.
struct Ranked {
  double score;
  std::size_t index;
};

bool ranks_before(const Ranked& a, const Ranked& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.index < b.index;
}

std::string format_ap(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", *v);
  return buf;
}

}  // namespace

std::vector<Detection> parse_detections(std::string_view source) {
  Json root;
  try {
    root = Json::parse(source.begin(), source.end());
  } catch (const Json::parse_error& e) {
    throw JsonParseError(e.byte, "malformed detections JSON at byte " +
                                     std::to_string(e.byte) + ": " + e.what());
  }
  if (!root.is_array()) throw SchemaError("detections must be a JSON array");
  std::vector<Detection> out;
  out.reserve(root.size());
  for (std::size_t i = 0; i < root.size(); ++i) {
    const Json& j = root[i];
    std::string where = "detection " + std::to_string(i);
    if (!j.is_object()) throw SchemaError(where + " must be an object");
    for (const char* key : {"image_id", "category_id", "bbox", "score"}) {
      if (!j.contains(key)) {
        throw SchemaError(where + ": missing required key '" + key + "'");
      }
    }
    Detection d;
    d.image_id = json_to_id(j["image_id"], where + " image_id");
    d.category_id = json_to_id(j["category_id"], where + " category_id");
    const Json& box = j["bbox"];
    if (!box.is_array() || box.size() != 4 ||
        !std::all_of(box.begin(), box.end(),
                     [](const Json& v) { return v.is_number(); })) {
      throw SchemaError(where + ": bbox must be an array of 4 numbers");
    }
    d.bbox = {box[0].get<double>(), box[1].get<double>(), box[2].get<double>(),
              box[3].get<double>()};
    if (!j["score"].is_number()) throw SchemaError(where + ": score must be a number");
    d.score = j["score"].get<double>();
    if (!std::isfinite(d.score)) throw SchemaError(where + ": score must be finite");
    if (!std::isfinite(d.bbox.x) || !std::isfinite(d.bbox.y) ||
        !(d.bbox.w > 0 && d.bbox.h > 0) || !std::isfinite(d.bbox.w) ||
        !std::isfinite(d.bbox.h)) {
      throw SchemaError(where + ": bbox must be finite with w > 0 and h > 0");
    }
    out.push_back(d);
  }
  return out;
}

std::string serialize_detections(std::span<const Detection> dets) {
  Json out = Json::array();
  for (const auto& d : dets) {
    out.push_back({{"image_id", d.image_id},
                   {"category_id", d.category_id},
                   {"bbox", {d.bbox.x, d.bbox.y, d.bbox.w, d.bbox.h}},
                   {"score", d.score}});
  }
  return out.dump();
}

double iou(const BBox& a, const BBox& b) {
  require_proper(a);
  require_proper(b);
  double inter = intersection(a, b);
  return inter / (a.w * a.h + b.w * b.h - inter);
}

double crowd_overlap(const BBox& det, const BBox& crowd) {
  require_proper(det);
  require_proper(crowd);
  return intersection(det, crowd) / (det.w * det.h);
}

MatchResult match_category(std::span<const GroundTruthBox> gt,
                           std::span<const BBox> dets, double threshold) {
  MatchResult r;
  r.outcomes.reserve(dets.size());
  r.gt_matched.assign(gt.size(), false);
  for (const BBox& d : dets) {
    std::optional<std::size_t> best;
    double best_iou = threshold;
    for (std::size_t g = 0; g < gt.size(); ++g) {
      if (gt[g].iscrowd || r.gt_matched[g]) continue;
      double v = iou(d, gt[g].bbox);
      if (v < best_iou) continue;
      best_iou = v;
      best = g;
    }
    if (best) {
      r.gt_matched[*best] = true;
      r.outcomes.push_back(Outcome::kTruePositive);
      continue;
    }
    bool covered = std::any_of(gt.begin(), gt.end(), [&](const GroundTruthBox& g) {
      return g.iscrowd && crowd_overlap(d, g.bbox) >= threshold;
    });
    r.outcomes.push_back(covered ? Outcome::kIgnored : Outcome::kFalsePositive);
  }
  return r;
}

std::optional<double> average_precision(std::span<const Outcome> outcomes,
                                        std::size_t gt_count) {
  if (gt_count == 0) return std::nullopt;
  // Cumulative true positives and precision at each cut of the ranked list.
  std::vector<std::size_t> tp;
  std::vector<double> precision;
  std::size_t tps = 0;
  for (Outcome o : outcomes) {
    if (o == Outcome::kIgnored) continue;
    if (o == Outcome::kTruePositive) ++tps;
    tp.push_back(tps);
    precision.push_back(static_cast<double>(tps) /
                        static_cast<double>(tp.size()));
  }
  // Precision envelope: best precision at any equal or higher recall.
  for (std::size_t i = precision.size(); i-- > 1;) {
    precision[i - 1] = std::max(precision[i - 1], precision[i]);
  }
  // Recall point r/100 is reached at the first cut with tp/G >= r/100,
  // compared exactly in integers.
  double sum = 0;
  for (int r = 0; r < kRecallPoints; ++r) {
    auto it = std::lower_bound(tp.begin(), tp.end(), r, [&](std::size_t t, int rr) {
      return t * 100 < static_cast<std::size_t>(rr) * gt_count;
    });
    if (it != tp.end()) sum += precision[it - tp.begin()];
  }
  return sum / kRecallPoints;
}

EvalReport evaluate(const Dataset& gt, std::span<const Detection> dets,
                    const CategoryMap& m) {
  std::unordered_map<std::int64_t, std::size_t> image_index;
  for (std::size_t i = 0; i < gt.images.size(); ++i) {
    image_index[gt.images[i].id] = i;
  }
  std::unordered_set<std::int64_t> known_categories;
  for (const auto& c : gt.categories) known_categories.insert(c.id);

  std::vector<std::int64_t> bad;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    if (!image_index.count(dets[i].image_id) ||
        !known_categories.count(dets[i].category_id)) {
      bad.push_back(static_cast<std::int64_t>(i));
    }
  }
  if (!bad.empty()) {
    std::string list;
    for (std::size_t i = 0; i < bad.size() && i < 20; ++i) {
      list += (i ? ", " : "") + std::to_string(bad[i]);
    }
    throw IntegrityError(
        "detections referencing an unknown image or category (indices): " + list,
        bad);
  }
  for (std::size_t i = 0; i < dets.size(); ++i) {
    const BBox& b = dets[i].bbox;
    if (!(b.w > 0 && b.h > 0) || !std::isfinite(dets[i].score)) {
      throw SchemaError("detection " + std::to_string(i) +
                        " has a degenerate box or non-finite score");
    }
  }
  for (std::int64_t id : m.selected_ids()) {
    if (!known_categories.count(id)) {
      throw IntegrityError("category " + std::to_string(id) +
                               " is selected but absent from the ground truth",
                           {id});
    }
  }
  std::vector<std::int64_t> degenerate;
  for (const auto& a : gt.annotations) {
    if (m.contains(a.category_id) && a.bbox.degenerate()) {
      degenerate.push_back(a.id);
    }
  }
  if (!degenerate.empty()) {
    throw SchemaError("ground-truth annotation " + std::to_string(degenerate[0]) +
                      " has a degenerate box and cannot be evaluated (" +
                      std::to_string(degenerate.size()) + " such boxes)");
  }

  const std::size_t num_images = gt.images.size();
  EvalReport report;
  std::vector<double> category_aps;
  for (std::int64_t cat : m.selected_ids()) {
    CategoryEval ce;
    ce.id = cat;
    ce.name = find_category(gt, cat)->name;
    ce.label = m.label_of(cat);

    // Per-image ground truth and detections of this category.
    std::vector<std::vector<GroundTruthBox>> gt_by_image(num_images);
    for (const auto& a : gt.annotations) {
      if (a.category_id != cat) continue;
      gt_by_image[image_index.at(a.image_id)].push_back({a.bbox, a.iscrowd});
      ++(a.iscrowd ? ce.num_crowd : ce.num_gt);
    }
    std::vector<std::vector<Ranked>> dets_by_image(num_images);
    for (std::size_t i = 0; i < dets.size(); ++i) {
      if (dets[i].category_id != cat) continue;
      dets_by_image[image_index.at(dets[i].image_id)].push_back(
          {dets[i].score, i});
      ++ce.num_detections;
    }
    for (auto& list : dets_by_image) {
      std::sort(list.begin(), list.end(), ranks_before);
      if (list.size() > kMaxDetections) list.resize(kMaxDetections);
    }

    for (std::size_t t = 0; t < kNumThresholds; ++t) {
      std::vector<std::pair<Ranked, Outcome>> pooled;
      for (std::size_t im = 0; im < num_images; ++im) {
        const auto& ranked = dets_by_image[im];
        if (ranked.empty()) continue;
        std::vector<BBox> boxes;
        boxes.reserve(ranked.size());
        for (const Ranked& r : ranked) boxes.push_back(dets[r.index].bbox);
        MatchResult mr = match_category(gt_by_image[im], boxes, kIouThresholds[t]);
        for (std::size_t d = 0; d < ranked.size(); ++d) {
          if (mr.outcomes[d] != Outcome::kIgnored) {
            pooled.emplace_back(ranked[d], mr.outcomes[d]);
          }
        }
      }
      std::sort(pooled.begin(), pooled.end(), [](const auto& a, const auto& b) {
        return ranks_before(a.first, b.first);
      });
      std::vector<Outcome> outcomes;
      outcomes.reserve(pooled.size());
      for (const auto& p : pooled) outcomes.push_back(p.second);
      ce.ap_per_threshold[t] = average_precision(outcomes, ce.num_gt);
    }

    std::vector<double> defined;
    for (const auto& v : ce.ap_per_threshold) {
      if (v) defined.push_back(*v);
    }
    if (!defined.empty()) {
      ce.ap = std::accumulate(defined.begin(), defined.end(), 0.0) /
              static_cast<double>(defined.size());
      category_aps.push_back(*ce.ap);
    }
    report.categories.push_back(std::move(ce));
  }
  if (!category_aps.empty()) {
    report.mean_ap = std::accumulate(category_aps.begin(), category_aps.end(), 0.0) /
                     static_cast<double>(category_aps.size());
  }
  return report;
}

Json EvalReport::to_json() const {
  auto opt = [](const std::optional<double>& v) -> Json {
    return v ? Json(*v) : Json(nullptr);
  };
  Json cats = Json::array();
  for (const auto& c : categories) {
    Json per = Json::array();
    for (const auto& v : c.ap_per_threshold) per.push_back(opt(v));
    cats.push_back({{"id", c.id},
                    {"name", c.name},
                    {"label", c.label},
                    {"num_gt", c.num_gt},
                    {"num_crowd", c.num_crowd},
                    {"num_detections", c.num_detections},
                    {"ap", opt(c.ap)},
                    {"ap_per_threshold", std::move(per)}});
  }
  return {{"iou_thresholds", kIouThresholds},
          {"recall_points", kRecallPoints},
          {"max_detections", kMaxDetections},
          {"categories", std::move(cats)},
          {"mean_ap", opt(mean_ap)}};
}

std::string EvalReport::summary_table() const {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-20s %6s %7s %7s %14s %8s %8s\n",
                "category", "id", "gt", "dets", "AP@[.50:.95]", "AP@.50",
                "AP@.75");
  out += line;
  for (const auto& c : categories) {
    std::snprintf(line, sizeof(line), "%-20s %6lld %7zu %7zu %14s %8s %8s\n",
                  c.name.substr(0, 20).c_str(), static_cast<long long>(c.id),
                  c.num_gt, c.num_detections, format_ap(c.ap).c_str(),
                  format_ap(c.ap_per_threshold[0]).c_str(),
                  format_ap(c.ap_per_threshold[5]).c_str());
    out += line;
  }
  std::snprintf(line, sizeof(line), "%-20s %6s %7s %7s %14s\n", "mean_ap", "", "",
                "", format_ap(mean_ap).c_str());
  out += line;
  return out;
}

}  // namespace ftkit
