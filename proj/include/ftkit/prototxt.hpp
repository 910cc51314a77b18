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

#ifndef FTKIT_PROTOTXT_HPP_
#define FTKIT_PROTOTXT_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ftkit::prototxt {

// A scalar field value. `lexeme` is the exact source text; the decoded
// members are derived from it, so equality compares kind and lexeme only.
class ScalarValue {
 public:
  enum class Kind { kInteger, kReal, kString, kIdentifier };

  static ScalarValue integer(std::int64_t v);
  static ScalarValue real(double v);
  // Escapes `v` and wraps it in `quote` ('"' or '\'').
  static ScalarValue string(std::string v, char quote = '"');
  // Bare identifiers: enum names and booleans such as TRAIN or true.
  static ScalarValue identifier(std::string v);

  // Builds a value from a lexeme that the lexer already validated.
  static ScalarValue from_lexeme(Kind kind, std::string lexeme, std::int64_t i,
                                 double r, std::string text, char quote);

  Kind kind() const { return kind_; }
  const std::string& lexeme() const { return lexeme_; }
  std::int64_t as_integer() const { return integer_; }
  double as_real() const { return real_; }
  // Unescaped content for strings, the identifier itself for kIdentifier.
  const std::string& text() const { return text_; }
  char quote() const { return quote_; }

  bool operator==(const ScalarValue& o) const {
    return kind_ == o.kind_ && lexeme_ == o.lexeme_;
  }

 private:
  Kind kind_ = Kind::kInteger;
  std::string lexeme_ = "0";
  std::int64_t integer_ = 0;
  double real_ = 0;
  std::string text_;
  char quote_ = '"';
};

struct Entry;

// Layout fields (`leading`, `separator`, `closing`, `trailing`) hold the
// source text between tokens: whitespace, `#` comments and optional `;`/`,`.
// They are re-emitted verbatim, so untouched regions round-trip byte for byte.
// An unset optional means "not from source": the serializer then uses one
// field per line with two-space indentation. Equality is structural and
// ignores layout.

// Body of a `name { ... }` field. `closing` precedes the closing brace.
struct Message {
  std::vector<Entry> entries;
  std::optional<std::string> closing;
  bool angle_brackets = false;  // `name < ... >` form

  bool operator==(const Message& o) const;
};

// One field. `separator` is the text between name and value (": ", " ", ...).
struct Entry {
  std::optional<std::string> leading;
  std::string name;
  std::string separator;
  std::variant<ScalarValue, Message> value;

  bool is_message() const { return std::holds_alternative<Message>(value); }
  const Message& message() const { return std::get<Message>(value); }
  Message& message() { return std::get<Message>(value); }
  const ScalarValue& scalar() const { return std::get<ScalarValue>(value); }

  static Entry scalar_field(std::string name, ScalarValue v);
  static Entry message_field(std::string name, std::vector<Entry> children);

  bool operator==(const Entry& o) const {
    return name == o.name && value == o.value;
  }
};

inline bool Message::operator==(const Message& o) const {
  return entries == o.entries && angle_brackets == o.angle_brackets;
}

struct PrototxtDocument {
  std::vector<Entry> entries;
  std::string trailing;  // layout after the last entry

  bool operator==(const PrototxtDocument& o) const {
    return entries == o.entries;
  }
};

// Throws SyntaxError (line and column, 1-based) on malformed input.
// Never crashes on arbitrary bytes; nesting is capped at kMaxDepth.
inline constexpr int kMaxDepth = 200;
PrototxtDocument parse_prototxt(std::string_view source);

// parse_prototxt(serialize_prototxt(d)) == d; for parsed documents the output
// is byte-identical to the input.
std::string serialize_prototxt(const PrototxtDocument& doc);

// Lookup helpers over an entry list.
const Entry* find_field(const std::vector<Entry>& entries, std::string_view name);
std::vector<const Entry*> find_fields(const std::vector<Entry>& entries,
                                      std::string_view name);

// ---------------------------------------------------------------------------
// Category-count rewrites.

enum class RewriteRule : std::size_t {
  kClsScoreOutputs = 0,  // layer "cls_score": inner_product_param.num_output = K+1
  kBboxPredOutputs = 1,  // layer "bbox_pred": inner_product_param.num_output = 4(K+1)
  kParamStrClasses = 2,  // python_param.param_str: 'num_classes': K+1
};
inline constexpr std::size_t kRuleCount = 3;
const char* rule_name(RewriteRule rule);

// Index path from the document root to a scalar entry.
using EntryPath = std::vector<std::size_t>;

struct RewriteSite {
  RewriteRule rule;
  EntryPath path;
  int line = 0;  // 1-based line of the value in the serialized document
  ScalarValue old_value;
  ScalarValue new_value;
};

struct RewritePlan {
  int k = 0;
  std::vector<RewriteSite> sites;
  std::array<std::size_t, kRuleCount> applied{};

  std::size_t planned(RewriteRule rule) const;
  std::size_t applied_count(RewriteRule rule) const {
    return applied[static_cast<std::size_t>(rule)];
  }
  std::size_t total_applied() const;
};

// Collects every rewrite site for `k` selected categories. Never fails for
// k >= 1; throws ContractViolation for k < 1.
RewritePlan plan_rewrites(const PrototxtDocument& doc, int k);

struct RewriteOutcome {
  PrototxtDocument document;
  RewritePlan plan;  // with `applied` filled in
};

// Changes exactly the planned sites. Throws EmptyResultError when the plan
// has no sites; ContractViolation when the plan does not match `doc`.
RewriteOutcome apply_rewrites(const PrototxtDocument& doc, const RewritePlan& plan);

// Rewrites the integer following every `'num_classes':` token in `s`.
// Returns the new string and the number of replacements.
std::pair<std::string, std::size_t> replace_num_classes(std::string_view s,
                                                        std::int64_t value);

struct VerifyReport {
  std::vector<std::int64_t> cls_score_outputs;
  std::vector<std::int64_t> bbox_pred_outputs;
  std::vector<std::int64_t> param_str_classes;
  std::vector<std::string> problems;

  bool ok() const { return problems.empty(); }
};

// Checks bbox_pred = 4 x cls_score and param_str class count = cls_score,
// and, when `k` is given, cls_score = k + 1.
VerifyReport verify(const PrototxtDocument& doc, std::optional<int> k = {});

}  // namespace ftkit::prototxt

#endif  // FTKIT_PROTOTXT_HPP_
