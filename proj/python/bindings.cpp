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

// Python bindings. Structured results cross the boundary as JSON text and are
// decoded by the `ftkit` package.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "ftkit/cli.hpp"
#include "ftkit/coco.hpp"
#include "ftkit/config.hpp"
#include "ftkit/error.hpp"
#include "ftkit/evaluator.hpp"
#include "ftkit/prototxt.hpp"
#include "ftkit/subset.hpp"

namespace py = pybind11;
namespace pt = ftkit::prototxt;

namespace {

std::string list_categories(const std::string& instances) {
  ftkit::Json out = ftkit::Json::array();
  for (const auto& c : ftkit::list_categories(ftkit::parse_dataset(instances))) {
    out.push_back({{"id", c.id}, {"name", c.name}, {"supercategory", c.supercategory}});
  }
  return out.dump();
}

std::string validate(const std::string& instances) {
  ftkit::ValidationReport r = ftkit::validate_dataset(instances);
  ftkit::Json findings = ftkit::Json::array();
  for (const auto& f : r.findings) {
    findings.push_back(
        {{"severity", f.severity == ftkit::Finding::Severity::kError ? "error" : "warning"},
         {"code", f.code},
         {"message", f.message},
         {"ids", f.ids}});
  }
  return ftkit::Json{{"valid", r.error_count() == 0},
                     {"errors", r.error_count()},
                     {"warnings", r.warning_count()},
                     {"findings", findings}}
      .dump();
}

std::tuple<std::string, std::string, std::string> filter(
    const std::string& instances, const std::vector<std::int64_t>& cat_ids) {
  ftkit::Dataset d = ftkit::parse_dataset(instances);
  ftkit::CategoryMap m = ftkit::make_category_map(d, cat_ids);
  ftkit::FilterResult r = ftkit::filter_dataset(d, m);
  return {ftkit::serialize_dataset(r.dataset), m.to_json().dump(),
          r.report.to_json().dump()};
}

std::string parse_config(const std::string& text) {
  ftkit::SubsetConfig c = ftkit::parse_config(text);
  ftkit::Json extra = ftkit::Json::object();
  for (const auto& [k, v] : c.extra) extra[k] = v;
  return ftkit::Json{{"cat_ids", c.cat_ids},
                     {"seed", c.seed},
                     {"demo_count", c.demo_count},
                     {"extra", extra}}
      .dump();
}

std::tuple<std::string, std::string> rewrite_prototxt(const std::string& text, int k,
                                                      bool verify) {
  pt::PrototxtDocument doc = pt::parse_prototxt(text);
  pt::RewriteOutcome out = pt::apply_rewrites(doc, pt::plan_rewrites(doc, k));
  if (verify) {
    pt::VerifyReport v = pt::verify(out.document, k);
    if (!v.ok()) throw ftkit::Error(ftkit::ErrorKind::kData, v.problems.front());
  }
  ftkit::Json applied = ftkit::Json::object();
  for (std::size_t r = 0; r < pt::kRuleCount; ++r) {
    applied[pt::rule_name(static_cast<pt::RewriteRule>(r))] = out.plan.applied[r];
  }
  return {pt::serialize_prototxt(out.document), applied.dump()};
}

std::vector<std::string> select_demo(const std::string& instances,
                                     const std::vector<std::int64_t>& cat_ids,
                                     std::size_t n, std::uint64_t seed) {
  ftkit::Dataset d = ftkit::parse_dataset(instances);
  ftkit::CategoryMap m = ftkit::make_category_map(d, cat_ids);
  std::vector<std::string> names;
  for (const auto& im : ftkit::select_demo_images(d, m, n, seed)) {
    names.push_back(im.file_name);
  }
  return names;
}

std::string evaluate(const std::string& instances, const std::string& detections,
                     const std::vector<std::int64_t>& cat_ids) {
  ftkit::Dataset d = ftkit::parse_dataset(instances);
  ftkit::CategoryMap m = ftkit::make_category_map(d, cat_ids);
  auto dets = ftkit::parse_detections(detections);
  return ftkit::evaluate(d, dets, m).to_json().dump();
}

ftkit::BBox to_box(const std::vector<double>& v) {
  if (v.size() != 4) throw py::value_error("a box is [x, y, w, h]");
  return {v[0], v[1], v[2], v[3]};
}

std::tuple<int, std::string, std::string> run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ftkit");
  std::ostringstream out, err;
  int code = ftkit::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

PYBIND11_MODULE(_ftkit, m) {
  m.doc() = "COCO category-subset fine-tuning toolkit (native core)";

  // Translators run newest first, so the subclass is registered last.
  auto error = py::register_exception<ftkit::Error>(m, "Error");
  py::register_exception<ftkit::EmptyResultError>(m, "EmptyResultError", error.ptr());
  py::register_exception<ftkit::ContractViolation>(m, "ContractViolation",
                                                   PyExc_ValueError);

  m.def("list_categories", &list_categories, py::arg("instances"));
  m.def("validate", &validate, py::arg("instances"));
  m.def("filter", &filter, py::arg("instances"), py::arg("cat_ids"));
  m.def("parse_config", &parse_config, py::arg("text"));
  m.def("rewrite_prototxt", &rewrite_prototxt, py::arg("text"), py::arg("k"),
        py::arg("verify") = false);
  m.def("select_demo", &select_demo, py::arg("instances"), py::arg("cat_ids"),
        py::arg("n"), py::arg("seed"));
  m.def("evaluate", &evaluate, py::arg("instances"), py::arg("detections"),
        py::arg("cat_ids"));
  m.def(
      "iou",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        return ftkit::iou(to_box(a), to_box(b));
      },
      py::arg("a"), py::arg("b"));
  m.def("run_cli", &run_cli, py::arg("args"));
}
