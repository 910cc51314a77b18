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

#include "ftkit/coco.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "ftkit/error.hpp"

namespace ftkit {
namespace {

constexpr double kMaxExactInteger = 9007199254740992.0;  // 2^53

const Json& require(const Json& obj, const char* key, std::string_view where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw SchemaError("missing required key '" + std::string(key) + "' in " +
                      std::string(where));
  }
  return *it;
}

double json_to_real(const Json& v, std::string_view what) {
  if (!v.is_number()) {
    throw SchemaError(std::string(what) + " must be a number");
  }
  double d = v.get<double>();
  if (!std::isfinite(d)) {
    throw SchemaError(std::string(what) + " must be finite");
  }
  return d;
}

std::int64_t positive_id(const Json& v, std::string_view what) {
  std::int64_t id = json_to_id(v, what);
  if (id < 1) {
    throw SchemaError(std::string(what) + " must be >= 1, got " +
                      std::to_string(id));
  }
  return id;
}

std::string json_to_string(const Json& v, std::string_view what) {
  if (!v.is_string()) throw SchemaError(std::string(what) + " must be a string");
  return v.get<std::string>();
}

// Counts unknown per-record keys so one warning per (kind, key) is emitted.
class UnknownKeys {
 public:
  void note(const Json& record, std::initializer_list<std::string_view> known) {
    for (const auto& [key, _] : record.items()) {
      if (std::find(known.begin(), known.end(), key) == known.end()) {
        ++counts_[key];
      }
    }
  }

  void flush(std::string_view kind, std::vector<Finding>* out) const {
    for (const auto& [key, n] : counts_) {
      out->push_back({Finding::Severity::kWarning, "dropped_key",
                      "dropped unknown key '" + key + "' from " +
                          std::to_string(n) + " " + std::string(kind) +
                          " record(s)",
                      {}});
    }
  }

 private:
  std::map<std::string, std::size_t> counts_;
};

ImageRecord parse_image(const Json& j, UnknownKeys& unknown) {
  if (!j.is_object()) throw SchemaError("image record must be an object");
  ImageRecord im;
  im.id = positive_id(require(j, "id", "image"), "image id");
  std::string where = "image " + std::to_string(im.id);
  im.file_name = json_to_string(require(j, "file_name", where), "file_name");
  if (im.file_name.empty()) throw SchemaError(where + ": empty file_name");
  im.width = positive_id(require(j, "width", where), where + " width");
  im.height = positive_id(require(j, "height", where), where + " height");
  unknown.note(j, {"id", "file_name", "width", "height"});
  return im;
}

Category parse_category(const Json& j, UnknownKeys& unknown) {
  if (!j.is_object()) throw SchemaError("category record must be an object");
  Category c;
  c.id = positive_id(require(j, "id", "category"), "category id");
  std::string where = "category " + std::to_string(c.id);
  c.name = json_to_string(require(j, "name", where), "name");
  if (c.name.empty()) throw SchemaError(where + ": empty name");
  if (auto it = j.find("supercategory"); it != j.end()) {
    c.supercategory = json_to_string(*it, "supercategory");
  }
  unknown.note(j, {"id", "name", "supercategory"});
  return c;
}

Annotation parse_annotation(const Json& j, UnknownKeys& unknown) {
  if (!j.is_object()) throw SchemaError("annotation record must be an object");
  Annotation a;
  a.id = positive_id(require(j, "id", "annotation"), "annotation id");
  std::string where = "annotation " + std::to_string(a.id);
  a.image_id = json_to_id(require(j, "image_id", where), where + " image_id");
  a.category_id =
      json_to_id(require(j, "category_id", where), where + " category_id");

  const Json& box = require(j, "bbox", where);
  if (!box.is_array() || box.size() != 4) {
    throw SchemaError(where + ": bbox must be an array of 4 numbers");
  }
  a.bbox = {json_to_real(box[0], where + " bbox x"),
            json_to_real(box[1], where + " bbox y"),
            json_to_real(box[2], where + " bbox w"),
            json_to_real(box[3], where + " bbox h")};
  if (a.bbox.x < 0 || a.bbox.y < 0 || a.bbox.w < 0 || a.bbox.h < 0) {
    throw SchemaError(where + ": bbox components must be >= 0");
  }

  if (auto it = j.find("area"); it != j.end()) {
    a.area = json_to_real(*it, where + " area");
    if (a.area < 0) throw SchemaError(where + ": area must be >= 0");
  } else {
    a.area = a.bbox.w * a.bbox.h;
  }

  if (auto it = j.find("iscrowd"); it != j.end()) {
    if (it->is_boolean()) {
      a.iscrowd = it->get<bool>();
    } else {
      std::int64_t flag = json_to_id(*it, where + " iscrowd");
      if (flag != 0 && flag != 1) {
        throw SchemaError(where + ": iscrowd must be 0 or 1");
      }
      a.iscrowd = flag == 1;
    }
  }
  if (auto it = j.find("segmentation"); it != j.end()) a.segmentation = *it;
  unknown.note(j, {"id", "image_id", "category_id", "bbox", "area", "iscrowd",
                   "segmentation"});
  return a;
}

template <typename Record, typename Key>
std::vector<std::int64_t> duplicate_ids(const std::vector<Record>& records,
                                        Key key) {
  std::unordered_set<std::int64_t> seen;
  std::set<std::int64_t> dups;
  for (const auto& r : records) {
    if (!seen.insert(key(r)).second) dups.insert(key(r));
  }
  return {dups.begin(), dups.end()};
}

std::string join_ids(const std::vector<std::int64_t>& ids) {
  std::string out;
  constexpr std::size_t kMaxListed = 20;
  for (std::size_t i = 0; i < ids.size() && i < kMaxListed; ++i) {
    if (i) out += ", ";
    out += std::to_string(ids[i]);
  }
  if (ids.size() > kMaxListed) {
    out += ", ... (" + std::to_string(ids.size()) + " total)";
  }
  return out;
}

void add_error(std::vector<Finding>* out, std::string code, std::string message,
               std::vector<std::int64_t> ids) {
  out->push_back({Finding::Severity::kError, std::move(code),
                  std::move(message) + ": " + join_ids(ids), std::move(ids)});
}

// Schema failures throw; integrity problems and warnings go to `findings`.
Dataset build_dataset(std::string_view source, std::vector<Finding>* findings) {
  Json root;
  try {
    root = Json::parse(source.begin(), source.end());
  } catch (const Json::parse_error& e) {
    throw JsonParseError(e.byte, "malformed JSON at byte " +
                                     std::to_string(e.byte) + ": " + e.what());
  }
  if (!root.is_object()) throw SchemaError("top-level value must be an object");

  Dataset d;
  for (const char* key : {"images", "annotations", "categories"}) {
    if (!require(root, key, "top-level object").is_array()) {
      throw SchemaError("'" + std::string(key) + "' must be an array");
    }
  }
  for (auto& [key, value] : root.items()) {
    if (key != "images" && key != "annotations" && key != "categories") {
      d.extra[key] = value;
    }
  }

  UnknownKeys unknown_images, unknown_anns, unknown_cats;
  for (const auto& j : root["images"]) {
    d.images.push_back(parse_image(j, unknown_images));
  }
  for (const auto& j : root["categories"]) {
    d.categories.push_back(parse_category(j, unknown_cats));
  }
  for (const auto& j : root["annotations"]) {
    d.annotations.push_back(parse_annotation(j, unknown_anns));
  }
  unknown_images.flush("image", findings);
  unknown_anns.flush("annotation", findings);
  unknown_cats.flush("category", findings);

  auto dup_images =
      duplicate_ids(d.images, [](const ImageRecord& r) { return r.id; });
  auto dup_anns =
      duplicate_ids(d.annotations, [](const Annotation& r) { return r.id; });
  auto dup_cats =
      duplicate_ids(d.categories, [](const Category& r) { return r.id; });
  if (!dup_images.empty()) {
    add_error(findings, "duplicate_image_id", "duplicate image ids", dup_images);
  }
  if (!dup_anns.empty()) {
    add_error(findings, "duplicate_annotation_id", "duplicate annotation ids",
              dup_anns);
  }
  if (!dup_cats.empty()) {
    add_error(findings, "duplicate_category_id", "duplicate category ids",
              dup_cats);
  }

  std::unordered_map<std::string, std::int64_t> names;
  std::set<std::int64_t> dup_name_ids;
  for (const auto& c : d.categories) {
    auto [it, inserted] = names.emplace(c.name, c.id);
    if (!inserted) dup_name_ids.insert(c.id);
  }
  if (!dup_name_ids.empty()) {
    add_error(findings, "duplicate_category_name",
              "categories reusing an existing name",
              {dup_name_ids.begin(), dup_name_ids.end()});
  }

  std::unordered_set<std::int64_t> image_ids, cat_ids;
  for (const auto& im : d.images) image_ids.insert(im.id);
  for (const auto& c : d.categories) cat_ids.insert(c.id);
  std::vector<std::int64_t> bad_image_ref, bad_cat_ref, degenerate;
  for (const auto& a : d.annotations) {
    if (!image_ids.count(a.image_id)) bad_image_ref.push_back(a.id);
    if (!cat_ids.count(a.category_id)) bad_cat_ref.push_back(a.id);
    if (a.bbox.degenerate()) degenerate.push_back(a.id);
  }
  if (!bad_image_ref.empty()) {
    add_error(findings, "dangling_image_id",
              "annotations referencing a missing image", bad_image_ref);
  }
  if (!bad_cat_ref.empty()) {
    add_error(findings, "dangling_category_id",
              "annotations referencing a missing category", bad_cat_ref);
  }
  for (std::int64_t id : degenerate) {
    findings->push_back({Finding::Severity::kWarning, "degenerate_bbox",
                         "annotation " + std::to_string(id) +
                             " has a zero-width or zero-height bbox",
                         {id}});
  }
  return d;
}

}  // namespace

std::size_t ValidationReport::error_count() const {
  return std::count_if(findings.begin(), findings.end(), [](const Finding& f) {
    return f.severity == Finding::Severity::kError;
  });
}

std::size_t ValidationReport::warning_count() const {
  return findings.size() - error_count();
}

std::int64_t json_to_id(const Json& v, std::string_view what) {
  if (v.is_number_integer()) {
    if (v.is_number_unsigned() &&
        v.get<std::uint64_t>() >
            static_cast<std::uint64_t>(INT64_MAX)) {
      throw SchemaError(std::string(what) + " is out of range");
    }
    return v.get<std::int64_t>();
  }
  if (v.is_number_float()) {
    double d = v.get<double>();
    if (std::isfinite(d) && std::trunc(d) == d && std::fabs(d) <= kMaxExactInteger) {
      return static_cast<std::int64_t>(d);
    }
    throw SchemaError(std::string(what) + " must be an integer, got " + v.dump());
  }
  throw SchemaError(std::string(what) + " must be an integer, got " + v.dump());
}

Dataset parse_dataset(std::string_view source, std::vector<Finding>* warnings) {
  std::vector<Finding> findings;
  Dataset d = build_dataset(source, &findings);
  for (auto& f : findings) {
    if (f.severity == Finding::Severity::kError) {
      throw IntegrityError(f.message, std::move(f.ids));
    }
  }
  if (warnings) {
    warnings->insert(warnings->end(), findings.begin(), findings.end());
  }
  return d;
}

ValidationReport validate_dataset(std::string_view source) {
  ValidationReport report;
  build_dataset(source, &report.findings);
  return report;
}

Json dataset_to_json(const Dataset& d) {
  Json root = Json::object();
  for (const auto& [key, value] : d.extra.items()) root[key] = value;

  Json images = Json::array();
  for (const auto& im : d.images) {
    images.push_back({{"id", im.id},
                      {"file_name", im.file_name},
                      {"width", im.width},
                      {"height", im.height}});
  }
  Json anns = Json::array();
  for (const auto& a : d.annotations) {
    Json j = {{"id", a.id},
              {"image_id", a.image_id},
              {"category_id", a.category_id},
              {"bbox", {a.bbox.x, a.bbox.y, a.bbox.w, a.bbox.h}},
              {"area", a.area},
              {"iscrowd", a.iscrowd ? 1 : 0}};
    if (!a.segmentation.is_null()) j["segmentation"] = a.segmentation;
    anns.push_back(std::move(j));
  }
  Json cats = Json::array();
  for (const auto& c : d.categories) {
    cats.push_back(
        {{"id", c.id}, {"name", c.name}, {"supercategory", c.supercategory}});
  }
  root["images"] = std::move(images);
  root["annotations"] = std::move(anns);
  root["categories"] = std::move(cats);
  return root;
}

std::string serialize_dataset(const Dataset& d) {
  return dataset_to_json(d).dump();
}

std::vector<Category> list_categories(const Dataset& d) {
  std::vector<Category> out = d.categories;
  std::sort(out.begin(), out.end(),
            [](const Category& a, const Category& b) { return a.id < b.id; });
  return out;
}

const Category* find_category(const Dataset& d, std::int64_t id) {
  for (const auto& c : d.categories) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

const ImageRecord* find_image(const Dataset& d, std::int64_t id) {
  for (const auto& im : d.images) {
    if (im.id == id) return &im;
  }
  return nullptr;
}

}  // namespace ftkit
