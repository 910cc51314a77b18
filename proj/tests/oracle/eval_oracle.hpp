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

// Brute-force reference for the COCO box protocol, used only by tests.
//
// It shares no code with the evaluator. Boxes must have integer coordinates
// so every overlap test is an exact integer comparison. Matching enumerates
// every injective assignment of detections to non-crowd boxes and keeps the
// one that satisfies the greedy conditions; the precision envelope is taken
// by scanning every cut of the ranked list for every recall point.

#ifndef FTKIT_TESTS_EVAL_ORACLE_HPP_
#define FTKIT_TESTS_EVAL_ORACLE_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ftkit/coco.hpp"
#include "ftkit/evaluator.hpp"
#include "ftkit/subset.hpp"

namespace oracle {

using i128 = __int128;

struct IBox {
  std::int64_t x0, y0, x1, y1;
  std::int64_t area() const { return (x1 - x0) * (y1 - y0); }
};

inline IBox to_ibox(const ftkit::BBox& b) {
  auto exact = [](double v) {
    if (std::trunc(v) != v) throw std::invalid_argument("oracle needs integer boxes");
    return static_cast<std::int64_t>(v);
  };
  std::int64_t x = exact(b.x), y = exact(b.y), w = exact(b.w), h = exact(b.h);
  return {x, y, x + w, y + h};
}

inline std::int64_t inter(const IBox& a, const IBox& b) {
  std::int64_t w = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
  std::int64_t h = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
  return w > 0 && h > 0 ? w * h : 0;
}

// IoU as an exact fraction num/den.
struct Frac {
  std::int64_t num, den;
};
inline Frac iou_frac(const IBox& a, const IBox& b) {
  std::int64_t i = inter(a, b);
  return {i, a.area() + b.area() - i};
}
inline bool at_least_percent(Frac f, int percent) {
  return static_cast<i128>(f.num) * 100 >= static_cast<i128>(percent) * f.den;
}
inline int compare(Frac a, Frac b) {
  i128 l = static_cast<i128>(a.num) * b.den, r = static_cast<i128>(b.num) * a.den;
  return l < r ? -1 : (l > r ? 1 : 0);
}

struct Gt {
  IBox box;
  bool crowd;
};
struct Det {
  IBox box;
  double score;
  std::size_t index;
};

// True when `assign` (det -> gt index or -1) is what greedy matching in
// descending score order produces.
inline bool greedy_consistent(const std::vector<Gt>& gt, const std::vector<Det>& dets,
                              const std::vector<int>& assign, int percent) {
  std::vector<bool> taken(gt.size(), false);
  for (std::size_t d = 0; d < dets.size(); ++d) {
    int best = -1;
    for (std::size_t g = 0; g < gt.size(); ++g) {
      if (gt[g].crowd || taken[g]) continue;
      Frac f = iou_frac(dets[d].box, gt[g].box);
      if (!at_least_percent(f, percent)) continue;
      // Highest IoU wins; among equals the later box.
      if (best < 0 || compare(f, iou_frac(dets[d].box, gt[best].box)) >= 0) {
        best = static_cast<int>(g);
      }
    }
    if (assign[d] != best) return false;
    if (best >= 0) taken[best] = true;
  }
  return true;
}

inline void enumerate(const std::vector<Gt>& gt, const std::vector<Det>& dets,
                      int percent, std::vector<int>& assign, std::vector<bool>& used,
                      std::size_t d, std::vector<std::vector<int>>& found) {
  if (d == dets.size()) {
    if (greedy_consistent(gt, dets, assign, percent)) found.push_back(assign);
    return;
  }
  assign[d] = -1;
  enumerate(gt, dets, percent, assign, used, d + 1, found);
  for (std::size_t g = 0; g < gt.size(); ++g) {
    if (gt[g].crowd || used[g]) continue;
    used[g] = true;
    assign[d] = static_cast<int>(g);
    enumerate(gt, dets, percent, assign, used, d + 1, found);
    used[g] = false;
  }
  assign[d] = -1;
}

enum class Kind { kTp, kFp, kIgnored };

// Outcome per detection (dets in ranked order).
inline std::vector<Kind> match(const std::vector<Gt>& gt, const std::vector<Det>& dets,
                               int percent) {
  std::vector<int> assign(dets.size(), -1);
  std::vector<bool> used(gt.size(), false);
  std::vector<std::vector<int>> found;
  enumerate(gt, dets, percent, assign, used, 0, found);
  if (found.size() != 1) throw std::logic_error("greedy matching must be unique");
  std::vector<Kind> out;
  for (std::size_t d = 0; d < dets.size(); ++d) {
    if (found[0][d] >= 0) {
      out.push_back(Kind::kTp);
      continue;
    }
    bool ignored = false;
    for (const Gt& g : gt) {
      if (!g.crowd) continue;
      std::int64_t i = inter(dets[d].box, g.box);
      if (static_cast<i128>(i) * 100 >=
          static_cast<i128>(percent) * dets[d].box.area()) {
        ignored = true;
      }
    }
    out.push_back(ignored ? Kind::kIgnored : Kind::kFp);
  }
  return out;
}

// Interpolated AP by brute force over recall points and cuts.
inline std::optional<double> ap(const std::vector<bool>& ranked_tp, std::size_t gt_count) {
  if (gt_count == 0) return std::nullopt;
  double sum = 0;
  for (int r = 0; r <= 100; ++r) {
    double best = 0;
    std::size_t tp = 0;
    for (std::size_t k = 1; k <= ranked_tp.size(); ++k) {
      if (ranked_tp[k - 1]) ++tp;
      if (tp * 100 >= static_cast<std::size_t>(r) * gt_count) {
        best = std::max(best, static_cast<double>(tp) / static_cast<double>(k));
      }
    }
    sum += best;
  }
  return sum / 101;
}

struct CategoryResult {
  std::int64_t id;
  std::array<std::optional<double>, 10> per_threshold;
  std::optional<double> ap;
};

struct Report {
  std::vector<CategoryResult> categories;
  std::optional<double> mean_ap;
};

inline Report evaluate(const ftkit::Dataset& gt_set,
                       const std::vector<ftkit::Detection>& dets,
                       const ftkit::CategoryMap& m) {
  static constexpr int kPercents[10] = {50, 55, 60, 65, 70, 75, 80, 85, 90, 95};
  Report rep;
  double mean_sum = 0;
  int mean_n = 0;
  for (std::int64_t cat : m.selected_ids()) {
    CategoryResult cr{cat, {}, std::nullopt};
    std::size_t gt_count = 0;
    for (const auto& a : gt_set.annotations) {
      if (a.category_id == cat && !a.iscrowd) ++gt_count;
    }
    for (int t = 0; t < 10; ++t) {
      struct Scored {
        double score;
        std::size_t index;
        bool tp;
      };
      std::vector<Scored> pooled;
      for (const auto& im : gt_set.images) {
        std::vector<Gt> gts;
        for (const auto& a : gt_set.annotations) {
          if (a.image_id == im.id && a.category_id == cat) {
            gts.push_back({to_ibox(a.bbox), a.iscrowd});
          }
        }
        std::vector<Det> ds;
        for (std::size_t i = 0; i < dets.size(); ++i) {
          if (dets[i].image_id == im.id && dets[i].category_id == cat) {
            ds.push_back({to_ibox(dets[i].bbox), dets[i].score, i});
          }
        }
        std::stable_sort(ds.begin(), ds.end(),
                         [](const Det& a, const Det& b) { return a.score > b.score; });
        if (ds.size() > 100) ds.resize(100);
        auto kinds = match(gts, ds, kPercents[t]);
        for (std::size_t d = 0; d < ds.size(); ++d) {
          if (kinds[d] != Kind::kIgnored) {
            pooled.push_back({ds[d].score, ds[d].index, kinds[d] == Kind::kTp});
          }
        }
      }
      std::sort(pooled.begin(), pooled.end(), [](const Scored& a, const Scored& b) {
        return a.score != b.score ? a.score > b.score : a.index < b.index;
      });
      std::vector<bool> ranked;
      for (const auto& s : pooled) ranked.push_back(s.tp);
      cr.per_threshold[t] = ap(ranked, gt_count);
    }
    if (gt_count > 0) {
      double s = 0;
      for (const auto& v : cr.per_threshold) s += *v;
      cr.ap = s / 10;
      mean_sum += *cr.ap;
      ++mean_n;
    }
    rep.categories.push_back(cr);
  }
  if (mean_n > 0) rep.mean_ap = mean_sum / mean_n;
  return rep;
}

}  // namespace oracle

#endif  // FTKIT_TESTS_EVAL_ORACLE_HPP_
