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

#ifndef FTKIT_COCO_HPP_
#define FTKIT_COCO_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace ftkit {

using Json = nlohmann::ordered_json;

struct Category {
  std::int64_t id = 0;
  std::string name;
  std::string supercategory;

  bool operator==(const Category&) const = default;
};

struct ImageRecord {
  std::int64_t id = 0;
  std::string file_name;
  std::int64_t width = 0;
  std::int64_t height = 0;

  bool operator==(const ImageRecord&) const = default;
};

// COCO box convention: left, top, width, height in pixels.
struct BBox {
  double x = 0;
  double y = 0;
  double w = 0;
  double h = 0;

  bool degenerate() const { return !(w > 0 && h > 0); }
  bool operator==(const BBox&) const = default;
};

struct Annotation {
  std::int64_t id = 0;
  std::int64_t image_id = 0;
  std::int64_t category_id = 0;
  BBox bbox;
  double area = 0;
  bool iscrowd = false;
  // Polygon or RLE payload, carried through unchanged. Null when absent.
  Json segmentation;

  bool operator==(const Annotation& o) const {
    return id == o.id && image_id == o.image_id &&
           category_id == o.category_id && bbox == o.bbox && area == o.area &&
           iscrowd == o.iscrowd && segmentation == o.segmentation;
  }
};

// In-memory COCO instances file. `extra` holds unknown top-level keys
// (`info`, `licenses`, ...) in their original order.
struct Dataset {
  std::vector<ImageRecord> images;
  std::vector<Annotation> annotations;
  std::vector<Category> categories;
  Json extra = Json::object();

  bool operator==(const Dataset& o) const {
    return images == o.images && annotations == o.annotations &&
           categories == o.categories && extra == o.extra;
  }
};

struct Finding {
  enum class Severity { kWarning, kError };
  Severity severity = Severity::kWarning;
  std::string code;     // short machine-readable tag, e.g. "degenerate_bbox"
  std::string message;
  std::vector<std::int64_t> ids;
};

struct ValidationReport {
  std::vector<Finding> findings;

  std::size_t error_count() const;
  std::size_t warning_count() const;
};

// Parses COCO instances JSON. Throws JsonParseError, SchemaError or
// IntegrityError. Non-fatal findings (dropped per-record keys, degenerate
// boxes) are appended to `warnings` when it is non-null.
Dataset parse_dataset(std::string_view source,
                      std::vector<Finding>* warnings = nullptr);

// Runs every check parse_dataset performs but collects all integrity
// problems instead of stopping at the first class. Malformed JSON and schema
// errors still throw, since nothing past them can be checked.
ValidationReport validate_dataset(std::string_view source);

// Compact JSON with deterministic key order: preserved side keys first, then
// `images`, `annotations`, `categories`.
std::string serialize_dataset(const Dataset& d);
Json dataset_to_json(const Dataset& d);

// All categories, ascending by id.
std::vector<Category> list_categories(const Dataset& d);

const Category* find_category(const Dataset& d, std::int64_t id);
const ImageRecord* find_image(const Dataset& d, std::int64_t id);

// Reads an id-like number: integral JSON number or a real with an exactly
// representable integral value. Throws SchemaError naming `what` otherwise.
std::int64_t json_to_id(const Json& v, std::string_view what);

}  // namespace ftkit

#endif  // FTKIT_COCO_HPP_
