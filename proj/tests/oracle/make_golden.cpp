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

// Writes the reference evaluation report for a ground-truth / detections /
// config triple using the brute-force oracle. The output has the same shape
// as `ftkit evaluate --format json`.
//
//   make_golden INSTANCES DETECTIONS CFG > report.json

#include <iostream>
#include <string>

#include "ftkit/config.hpp"
#include "oracle/eval_oracle.hpp"
#include "support/generators.hpp"

int main(int argc, char** argv) {
  if (argc != 4) {
    std::cerr << "usage: make_golden INSTANCES DETECTIONS CFG\n";
    return 1;
  }
  ftkit::Dataset d = ftkit::parse_dataset(gen::read_file(argv[1]));
  auto dets = ftkit::parse_detections(gen::read_file(argv[2]));
  auto cfg = ftkit::parse_config(gen::read_file(argv[3]));
  ftkit::CategoryMap m = ftkit::make_category_map(d, cfg.cat_ids);
  oracle::Report rep = oracle::evaluate(d, dets, m);

  auto opt = [](const std::optional<double>& v) {
    return v ? ftkit::Json(*v) : ftkit::Json(nullptr);
  };
  ftkit::Json cats = ftkit::Json::array();
  for (const auto& c : rep.categories) {
    std::size_t num_gt = 0, num_crowd = 0, num_dets = 0;
    for (const auto& a : d.annotations) {
      if (a.category_id == c.id) ++(a.iscrowd ? num_crowd : num_gt);
    }
    for (const auto& det : dets) {
      if (det.category_id == c.id) ++num_dets;
    }
    ftkit::Json per = ftkit::Json::array();
    for (const auto& v : c.per_threshold) per.push_back(opt(v));
    cats.push_back({{"id", c.id},
                    {"name", ftkit::find_category(d, c.id)->name},
                    {"label", m.label_of(c.id)},
                    {"num_gt", num_gt},
                    {"num_crowd", num_crowd},
                    {"num_detections", num_dets},
                    {"ap", opt(c.ap)},
                    {"ap_per_threshold", per}});
  }
  ftkit::Json out = {{"iou_thresholds", {0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95}},
                     {"recall_points", 101},
                     {"max_detections", 100},
                     {"categories", cats},
                     {"mean_ap", opt(rep.mean_ap)}};
  std::cout << out.dump(2) << "\n";
  return 0;
}
