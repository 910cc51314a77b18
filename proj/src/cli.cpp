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

#include "ftkit/cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "ftkit/coco.hpp"
#include "ftkit/config.hpp"
#include "ftkit/evaluator.hpp"
#include "ftkit/prototxt.hpp"
#include "ftkit/subset.hpp"

namespace ftkit::cli {
namespace {

namespace fs = std::filesystem;
namespace pt = ftkit::prototxt;

constexpr const char* kInstancesFile = "instances.json";
constexpr const char* kCategoryMapFile = "category_map.json";
constexpr const char* kDemoListFile = "demo_images.txt";

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kData, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kData, "cannot write '" + path.string() + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorKind::kData, "cannot write '" + path.string() + "'");
}

const char* kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage: return "usage";
    case ErrorKind::kData: return "data";
    case ErrorKind::kEmpty: return "empty";
  }
  return "data";
}

void report_warnings(const std::vector<Finding>& warnings, std::ostream& err) {
  for (const auto& w : warnings) {
    err << "ftkit: warning[" << w.code << "]: " << w.message << "\n";
  }
}

Dataset load_dataset(const std::string& path, std::ostream& err) {
  std::vector<Finding> warnings;
  Dataset d = parse_dataset(read_file(path), &warnings);
  report_warnings(warnings, err);
  return d;
}

// Flag values shared by the subcommands.
struct Options {
  std::string instances;
  std::string cfg;
  std::string out_dir;
  std::string detections;
  std::string format;
  std::vector<std::string> prototxts;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> count;
  bool in_place = false;
  bool verify = false;
};

Json finding_json(const Finding& f) {
  return {{"severity", f.severity == Finding::Severity::kError ? "error" : "warning"},
          {"code", f.code},
          {"message", f.message},
          {"ids", f.ids}};
}

int cmd_list_categories(const Options& o, std::ostream& out, std::ostream& err) {
  Dataset d = load_dataset(o.instances, err);
  auto cats = list_categories(d);
  if (o.format == "json") {
    Json arr = Json::array();
    for (const auto& c : cats) {
      arr.push_back(
          {{"id", c.id}, {"name", c.name}, {"supercategory", c.supercategory}});
    }
    out << arr.dump() << "\n";
  } else {
    for (const auto& c : cats) {
      out << c.id << "\t" << c.name << "\t" << c.supercategory << "\n";
    }
  }
  return kExitOk;
}

struct FilterStage {
  FilterResult result;
  CategoryMap map;
};

FilterStage run_filter(const Options& o, const SubsetConfig& cfg,
                       const fs::path& out_dir, std::ostream& err) {
  Dataset d = load_dataset(o.instances, err);
  CategoryMap m = make_category_map(d, cfg.cat_ids);
  FilterResult r = filter_dataset(d, m);
  write_file(out_dir / kInstancesFile, serialize_dataset(r.dataset) + "\n");
  write_file(out_dir / kCategoryMapFile, m.to_json().dump(2) + "\n");
  return {std::move(r), std::move(m)};
}

int cmd_filter(const Options& o, std::ostream& out, std::ostream& err) {
  SubsetConfig cfg = parse_config(read_file(o.cfg));
  FilterStage s = run_filter(o, cfg, o.out_dir, err);
  out << s.result.report.to_json().dump() << "\n";
  return kExitOk;
}

struct RewrittenFile {
  std::string input;
  fs::path output;
  std::string text;
  pt::RewritePlan plan;
  std::optional<pt::VerifyReport> verify;
};

// Rewrites every file in memory first so nothing is written unless all
// files succeed.
std::vector<RewrittenFile> run_rewrite(const std::vector<std::string>& paths,
                                       int k, bool in_place,
                                       const fs::path& out_dir, bool verify) {
  std::set<std::string> names;
  std::vector<RewrittenFile> files;
  for (const auto& path : paths) {
    RewrittenFile f;
    f.input = path;
    if (in_place) {
      f.output = path;
    } else {
      std::string name = fs::path(path).filename().string();
      if (!names.insert(name).second) {
        throw Error(ErrorKind::kUsage,
                    "two inputs share the file name '" + name +
                        "'; use --in-place or separate runs");
      }
      f.output = out_dir / name;
    }
    pt::PrototxtDocument doc;
    try {
      doc = pt::parse_prototxt(read_file(path));
    } catch (const SyntaxError& e) {
      throw SyntaxError(e.line(), e.column(), e.message(), path);
    }
    pt::RewritePlan plan = pt::plan_rewrites(doc, k);
    pt::RewriteOutcome outcome;
    try {
      outcome = pt::apply_rewrites(doc, plan);
    } catch (const EmptyResultError& e) {
      throw EmptyResultError(path + ": " + e.what());
    }
    if (verify) {
      f.verify = pt::verify(outcome.document, k);
      if (!f.verify->ok()) {
        std::string msg = path + ": verification failed";
        for (const auto& p : f.verify->problems) msg += "; " + p;
        throw Error(ErrorKind::kData, msg);
      }
    }
    f.text = pt::serialize_prototxt(outcome.document);
    f.plan = std::move(outcome.plan);
    files.push_back(std::move(f));
  }
  for (const auto& f : files) write_file(f.output, f.text);
  return files;
}

Json rewrite_json(const std::vector<RewrittenFile>& files) {
  Json arr = Json::array();
  for (const auto& f : files) {
    Json applied = Json::object();
    for (std::size_t r = 0; r < pt::kRuleCount; ++r) {
      applied[pt::rule_name(static_cast<pt::RewriteRule>(r))] = f.plan.applied[r];
    }
    Json j = {{"input", f.input}, {"output", f.output.string()},
              {"applied", std::move(applied)}};
    if (f.verify) j["verified"] = f.verify->ok();
    arr.push_back(std::move(j));
  }
  return arr;
}

int cmd_rewrite(const Options& o, std::ostream& out, std::ostream&) {
  if (o.in_place == !o.out_dir.empty()) {
    throw Error(ErrorKind::kUsage, "rewrite needs exactly one of --out or --in-place");
  }
  SubsetConfig cfg = parse_config(read_file(o.cfg));
  const int k = static_cast<int>(cfg.cat_ids.size());
  auto files = run_rewrite(o.prototxts, k, o.in_place, o.out_dir, o.verify);
  Json report = {{"k", k}, {"num_classes", k + 1}, {"files", rewrite_json(files)}};
  out << report.dump() << "\n";
  return kExitOk;
}

std::vector<ImageRecord> run_select(const Dataset& d, const SubsetConfig& cfg,
                                    const Options& o) {
  CategoryMap m = make_category_map(d, cfg.cat_ids);
  return select_demo_images(d, m, o.count.value_or(cfg.demo_count),
                            o.seed.value_or(cfg.seed));
}

int cmd_select_demo(const Options& o, std::ostream& out, std::ostream& err) {
  SubsetConfig cfg = parse_config(read_file(o.cfg));
  Dataset d = load_dataset(o.instances, err);
  auto picked = run_select(d, cfg, o);
  if (o.format == "json") {
    Json arr = Json::array();
    for (const auto& im : picked) {
      arr.push_back({{"id", im.id}, {"file_name", im.file_name}});
    }
    out << arr.dump() << "\n";
  } else {
    for (const auto& im : picked) out << im.file_name << "\n";
  }
  return kExitOk;
}

int cmd_evaluate(const Options& o, std::ostream& out, std::ostream& err) {
  SubsetConfig cfg = parse_config(read_file(o.cfg));
  Dataset gt = load_dataset(o.instances, err);
  CategoryMap m = make_category_map(gt, cfg.cat_ids);
  auto dets = parse_detections(read_file(o.detections));
  EvalReport report = evaluate(gt, dets, m);
  if (!o.out_dir.empty()) {
    write_file(fs::path(o.out_dir) / "eval_report.json",
               report.to_json().dump(2) + "\n");
  }
  if (o.format == "json") {
    out << report.to_json().dump() << "\n";
  } else {
    out << report.summary_table();
  }
  return kExitOk;
}

int cmd_validate(const Options& o, std::ostream& out, std::ostream& err) {
  std::string source = read_file(o.instances);
  ValidationReport report;
  try {
    report = validate_dataset(source);
  } catch (const JsonParseError& e) {
    report.findings.push_back(
        {Finding::Severity::kError, "malformed_json", e.what(),
         {static_cast<std::int64_t>(e.offset())}});
  } catch (const SchemaError& e) {
    report.findings.push_back({Finding::Severity::kError, "schema", e.what(), {}});
  }
  Json findings = Json::array();
  for (const auto& f : report.findings) findings.push_back(finding_json(f));
  Json j = {{"valid", report.error_count() == 0},
            {"errors", report.error_count()},
            {"warnings", report.warning_count()},
            {"findings", std::move(findings)}};
  out << j.dump() << "\n";
  for (const auto& f : report.findings) {
    if (f.severity == Finding::Severity::kError) {
      err << "ftkit: error[" << f.code << "]: " << f.message << "\n";
    }
  }
  return report.error_count() == 0 ? kExitOk : kExitData;
}

int cmd_pipeline(const Options& o, std::ostream& out, std::ostream& err) {
  SubsetConfig cfg = parse_config(read_file(o.cfg));
  fs::path dir(o.out_dir);
  FilterStage s = run_filter(o, cfg, dir, err);
  auto files = run_rewrite(o.prototxts, s.map.k(), false, dir, o.verify);
  auto picked = run_select(s.result.dataset, cfg, o);
  std::string list;
  Json names = Json::array();
  for (const auto& im : picked) {
    list += im.file_name + "\n";
    names.push_back(im.file_name);
  }
  write_file(dir / kDemoListFile, list);
  Json report = {{"filter", s.result.report.to_json()},
                 {"category_map", s.map.to_json()},
                 {"rewrite", rewrite_json(files)},
                 {"demo_images", std::move(names)}};
  out << report.dump() << "\n";
  return kExitOk;
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage: return kExitUsage;
    case ErrorKind::kData: return kExitData;
    case ErrorKind::kEmpty: return kExitEmpty;
  }
  return kExitData;
}

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Fine-tuning support toolkit for COCO category subsets", "ftkit"};
  app.require_subcommand(1);
  Options o;

  auto instances = [&](CLI::App* sub) {
    sub->add_option("--instances", o.instances, "COCO instances JSON")
        ->required();
  };
  auto cfg = [&](CLI::App* sub) {
    sub->add_option("--cfg", o.cfg, "config file with CAT_IDS")->required();
  };
  auto seed_count = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "sampling seed (default: SEED from --cfg, else 0)");
    sub->add_option("--count", o.count, "number of demo images (default: DEMO_COUNT)")
        ->check(CLI::PositiveNumber);
  };

  auto* list = app.add_subcommand("list-categories", "print the category catalog");
  instances(list);
  o.format = "tsv";
  list->add_option("--format", o.format, "tsv or json")
      ->check(CLI::IsMember({"tsv", "json"}));

  auto* filter = app.add_subcommand(
      "filter", "reduce a dataset to the CAT_IDS categories");
  instances(filter);
  cfg(filter);
  filter->add_option("--out", o.out_dir, "output directory")->required();

  auto* rewrite = app.add_subcommand(
      "rewrite", "set category-dependent prototxt parameters from CAT_IDS");
  rewrite->add_option("prototxt", o.prototxts, "prototxt files")->required();
  cfg(rewrite);
  rewrite->add_option("--out", o.out_dir, "output directory");
  rewrite->add_flag("--in-place", o.in_place, "overwrite the input files");
  rewrite->add_flag("--verify", o.verify, "check output consistency");

  auto* select = app.add_subcommand(
      "select-demo", "pick demo images containing selected categories");
  instances(select);
  cfg(select);
  seed_count(select);
  select->add_option("--format", o.format, "tsv or json")
      ->check(CLI::IsMember({"tsv", "json"}));

  auto* eval = app.add_subcommand(
      "evaluate", "score detections with AP@IoU=[0.50,0.95]");
  instances(eval);
  cfg(eval);
  eval->add_option("--detections", o.detections, "COCO results JSON")->required();
  eval->add_option("--out", o.out_dir, "also write eval_report.json here");
  eval->add_option("--format", o.format, "table or json")
      ->check(CLI::IsMember({"tsv", "table", "json"}));

  auto* validate = app.add_subcommand("validate", "check dataset integrity");
  instances(validate);

  auto* pipeline = app.add_subcommand(
      "pipeline", "filter, rewrite and select-demo in one run");
  instances(pipeline);
  cfg(pipeline);
  pipeline->add_option("--prototxt", o.prototxts, "prototxt files to rewrite")
      ->required();
  pipeline->add_option("--out", o.out_dir, "output directory")->required();
  pipeline->add_flag("--verify", o.verify, "check rewritten prototxts");
  seed_count(pipeline);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (list->parsed()) return cmd_list_categories(o, out, err);
    if (filter->parsed()) return cmd_filter(o, out, err);
    if (rewrite->parsed()) return cmd_rewrite(o, out, err);
    if (select->parsed()) return cmd_select_demo(o, out, err);
    if (eval->parsed()) return cmd_evaluate(o, out, err);
    if (validate->parsed()) return cmd_validate(o, out, err);
    if (pipeline->parsed()) return cmd_pipeline(o, out, err);
  } catch (const Error& e) {
    err << "ftkit: error[" << kind_name(e.kind()) << "]: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const fs::filesystem_error& e) {
    err << "ftkit: error[data]: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "ftkit: error[internal]: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace ftkit::cli
