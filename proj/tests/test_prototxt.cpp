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

#include <set>
#include <string>

#include "doctest.h"
#include "ftkit/error.hpp"
#include "ftkit/prototxt.hpp"
#include "support/generators.hpp"

using namespace ftkit;
using namespace ftkit::prototxt;

namespace {

std::string mini(const char* name) {
  return gen::read_file(std::string(FTKIT_DATA_DIR) + "/mini/" + name);
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t nl = s.find('\n', start);
    out.push_back(s.substr(start, nl - start));
    if (nl == std::string::npos) return out;
    start = nl + 1;
  }
}

// num_output of the named layer, read back through the public AST.
std::int64_t num_output(const PrototxtDocument& doc, const std::string& layer) {
  for (const Entry* l : find_fields(doc.entries, "layer")) {
    const Entry* name = find_field(l->message().entries, "name");
    if (name && name->scalar().text() == layer) {
      const Entry* p = find_field(l->message().entries, "inner_product_param");
      return find_field(p->message().entries, "num_output")->scalar().as_integer();
    }
  }
  return -1;
}

SyntaxError syntax_error(const std::string& src) {
  try {
    parse_prototxt(src);
  } catch (const SyntaxError& e) {
    return e;
  }
  FAIL("expected SyntaxError for: " << src);
  return SyntaxError(0, 0, "");
}

}  // namespace

TEST_CASE("single string field") {
  PrototxtDocument doc = parse_prototxt(R"(name: "VGG_CNN_M_1024")");
  REQUIRE(doc.entries.size() == 1);
  const Entry& e = doc.entries[0];
  CHECK(e.name == "name");
  REQUIRE_FALSE(e.is_message());
  CHECK(e.scalar().kind() == ScalarValue::Kind::kString);
  CHECK(e.scalar().text() == "VGG_CNN_M_1024");
}

TEST_CASE("nested messages match a hand-built tree") {
  PrototxtDocument doc = parse_prototxt(
      R"(layer { name: "cls_score" inner_product_param { num_output: 81 } })");
  Entry num{" ", "num_output", ": ", ScalarValue::integer(81)};
  Entry param{" ", "inner_product_param", " ", Message{{num}, " ", false}};
  Entry name{" ", "name", ": ", ScalarValue::string("cls_score")};
  Entry layer{"", "layer", " ", Message{{name, param}, " ", false}};
  PrototxtDocument expected{{layer}, ""};
  CHECK(doc == expected);
  CHECK(doc.entries[0].message().entries[1].message().entries[0].scalar().as_integer() ==
        81);
}

TEST_CASE("syntax errors carry positions") {
  SUBCASE("unbalanced brace") {
    auto e = syntax_error("layer {");
    CHECK(e.line() == 1);
    CHECK(e.message().find("unbalanced") != std::string::npos);
  }
  SUBCASE("unterminated string") {
    auto e = syntax_error("a: 1\nname: \"abc\n");
    CHECK(e.line() == 2);
    CHECK(e.column() == 7);
    CHECK(e.message() == "unterminated string");
  }
  SUBCASE("stray closing brace") {
    auto e = syntax_error("a: 1\n}");
    CHECK(e.line() == 2);
    CHECK(e.column() == 1);
  }
  SUBCASE("missing colon before scalar") {
    CHECK(syntax_error("num_output 81").message().find("expected ':'") !=
          std::string::npos);
  }
  SUBCASE("bad number and escape") {
    syntax_error("a: 12abc");
    syntax_error("a: 0x");
    syntax_error("a: 09");
    syntax_error("a: \"\\q\"");
    syntax_error("a: [1, 2]");
    syntax_error("a:");
    syntax_error("1a: 2");
  }
  SUBCASE("nesting limit") {
    std::string deep;
    for (int i = 0; i <= kMaxDepth; ++i) deep += "m {";
    CHECK(syntax_error(deep).message() == "nesting too deep");
  }
}

TEST_CASE("scalar decoding") {
  auto value = [](const std::string& lex) {
    return parse_prototxt("v: " + lex).entries.at(0).scalar();
  };
  CHECK(value("0x1F").as_integer() == 31);
  CHECK(value("017").as_integer() == 15);
  CHECK(value("-7").as_integer() == -7);
  CHECK(value("-9223372036854775808").as_integer() == INT64_MIN);
  CHECK(value("18446744073709551615").kind() == ScalarValue::Kind::kReal);
  CHECK(value("1.5").kind() == ScalarValue::Kind::kReal);
  CHECK(value("2.").as_real() == 2.0);
  CHECK(value(".5").as_real() == 0.5);
  CHECK(value("1e-3").as_real() == doctest::Approx(1e-3));
  CHECK(value("3.5f").as_real() == 3.5);
  CHECK(value("-0.25").as_real() == -0.25);
  CHECK(value("TRAIN").kind() == ScalarValue::Kind::kIdentifier);
  CHECK(value("-inf").kind() == ScalarValue::Kind::kIdentifier);
  CHECK(value(R"('it\'s')").text() == "it's");
  CHECK(value(R"('it\'s')").quote() == '\'');
  CHECK(value(R"("\101\x42\n")").text() == "AB\n");
}

TEST_CASE("fixtures round-trip byte for byte") {
  for (const char* f : {"train.prototxt", "test.prototxt"}) {
    std::string src = mini(f);
    PrototxtDocument doc = parse_prototxt(src);
    CHECK(serialize_prototxt(doc) == src);
    CHECK(parse_prototxt(serialize_prototxt(doc)) == doc);
  }
  CHECK(serialize_prototxt(PrototxtDocument{}).empty());
  CHECK(parse_prototxt("").entries.empty());
}

TEST_CASE("separators and angle brackets round-trip") {
  for (std::string src : {"a: 1; b: 2, c { d: 3 }", "m < x: 1 >", "m: { }",
                          "layer{name:'x'}", "s: \"a\"t: 2", "# only a comment",
                          "a: 1 # trailing", "\r\na:\t1\r\n"}) {
    CHECK(serialize_prototxt(parse_prototxt(src)) == src);
  }
}

TEST_CASE("programmatic documents serialize to valid text") {
  PrototxtDocument doc;
  doc.entries.push_back(Entry::scalar_field("name", ScalarValue::string("net \"x\"")));
  doc.entries.push_back(Entry::scalar_field("phase", ScalarValue::identifier("TRAIN")));
  doc.entries.push_back(Entry::message_field(
      "layer", {Entry::scalar_field("num_output", ScalarValue::integer(3)),
                Entry::scalar_field("std", ScalarValue::real(0.01)),
                Entry::scalar_field("scale", ScalarValue::real(2))}));
  std::string text = serialize_prototxt(doc);
  CHECK(text ==
        "name: \"net \\\"x\\\"\"\nphase: TRAIN\nlayer {\n  num_output: 3\n"
        "  std: 0.01\n  scale: 2.0\n}");
  CHECK(parse_prototxt(text) == doc);
  CHECK_THROWS_AS(ScalarValue::identifier("1abc"), ContractViolation);
}

TEST_CASE("generated documents round-trip") {
  gen::Rng rng(3);
  gen::PrototxtText g(rng);
  for (int i = 0; i < 300; ++i) {
    std::string src = g.document();
    PrototxtDocument doc = parse_prototxt(src);
    REQUIRE(serialize_prototxt(doc) == src);
  }
}

TEST_CASE("arbitrary bytes yield a document or a positioned error") {
  gen::Rng rng(17);
  std::string train = mini("train.prototxt");
  for (int i = 0; i < 2000; ++i) {
    std::string src;
    if (i % 2) {
      src.resize(rng() % 48);
      for (auto& c : src) c = static_cast<char>(rng() & 0xff);
    } else {
      src = train;
      for (int m = 0; m < 3; ++m) src[rng() % src.size()] = static_cast<char>(rng() & 0xff);
    }
    try {
      auto doc = parse_prototxt(src);
      CHECK(serialize_prototxt(doc) == src);
    } catch (const SyntaxError& e) {
      CHECK(e.line() >= 1);
      CHECK(e.column() >= 1);
    }
  }
}

TEST_CASE("plan_rewrites finds every site") {
  PrototxtDocument train = parse_prototxt(mini("train.prototxt"));
  RewritePlan plan = plan_rewrites(train, 2);
  REQUIRE(plan.sites.size() == 3);
  CHECK(plan.planned(RewriteRule::kClsScoreOutputs) == 1);
  CHECK(plan.planned(RewriteRule::kBboxPredOutputs) == 1);
  CHECK(plan.planned(RewriteRule::kParamStrClasses) == 1);
  for (const auto& s : plan.sites) {
    switch (s.rule) {
      case RewriteRule::kClsScoreOutputs:
        CHECK(s.new_value.as_integer() == 3);
        CHECK(s.old_value.as_integer() == 81);
        break;
      case RewriteRule::kBboxPredOutputs:
        CHECK(s.new_value.as_integer() == 12);
        break;
      case RewriteRule::kParamStrClasses:
        CHECK(s.new_value.text() == "'num_classes': 3");
        CHECK(s.new_value.lexeme() == "\"'num_classes': 3\"");
        CHECK(s.line == 12);
        break;
    }
  }

  RewritePlan big = plan_rewrites(train, 80);
  for (const auto& s : big.sites) {
    if (s.rule == RewriteRule::kClsScoreOutputs) CHECK(s.new_value.as_integer() == 81);
    if (s.rule == RewriteRule::kBboxPredOutputs) CHECK(s.new_value.as_integer() == 324);
  }

  RewritePlan test = plan_rewrites(parse_prototxt(mini("test.prototxt")), 2);
  CHECK(test.sites.size() == 2);
  CHECK(test.planned(RewriteRule::kParamStrClasses) == 0);

  CHECK_THROWS_AS(plan_rewrites(train, 0), ContractViolation);
}

TEST_CASE("apply_rewrites") {
  std::string src = mini("train.prototxt");
  PrototxtDocument doc = parse_prototxt(src);
  RewriteOutcome out = apply_rewrites(doc, plan_rewrites(doc, 2));
  CHECK(out.plan.total_applied() == 3);
  PrototxtDocument back = parse_prototxt(serialize_prototxt(out.document));
  CHECK(num_output(back, "bbox_pred") == 12);
  CHECK(num_output(back, "cls_score") == 3);
  CHECK(verify(back, 2).ok());

  SUBCASE("second application is the identity") {
    RewriteOutcome again = apply_rewrites(out.document, plan_rewrites(out.document, 2));
    CHECK(again.document == out.document);
    CHECK(again.plan.total_applied() == 3);
  }
  SUBCASE("only the planned lines change") {
    auto before = lines_of(src);
    auto after = lines_of(serialize_prototxt(out.document));
    REQUIRE(before.size() == after.size());
    std::set<int> planned;
    for (const auto& s : out.plan.sites) planned.insert(s.line);
    int changed = 0;
    for (std::size_t i = 0; i < before.size(); ++i) {
      if (before[i] != after[i]) {
        ++changed;
        CHECK(planned.count(static_cast<int>(i) + 1) == 1);
      }
    }
    CHECK(changed == 3);
    // The comment after the cls_score value survives.
    CHECK(serialize_prototxt(out.document).find("num_output: 3  # one per class") !=
          std::string::npos);
  }
  SUBCASE("no targets") {
    PrototxtDocument plain = parse_prototxt("layer { name: \"fc7\" }");
    CHECK_THROWS_AS(apply_rewrites(plain, plan_rewrites(plain, 2)), EmptyResultError);
  }
  SUBCASE("mismatched plan") {
    PrototxtDocument other = parse_prototxt(mini("test.prototxt"));
    CHECK_THROWS_AS(apply_rewrites(other, plan_rewrites(doc, 2)), ContractViolation);
  }
}

TEST_CASE("param_str keeps its quote style and other characters") {
  PrototxtDocument doc = parse_prototxt(
      "layer { python_param { param_str: '\\'num_classes\\': 81, \\'x\\': 2' } }");
  RewriteOutcome out = apply_rewrites(doc, plan_rewrites(doc, 4));
  const ScalarValue& v =
      out.document.entries[0].message().entries[0].message().entries[0].scalar();
  CHECK(v.quote() == '\'');
  CHECK(v.text() == "'num_classes': 5, 'x': 2");

  PrototxtDocument dq = parse_prototxt(
      "python_param { param_str: \"'num_classes':81\\t'feat_stride': 16\" }");
  std::string text = serialize_prototxt(apply_rewrites(dq, plan_rewrites(dq, 1)).document);
  CHECK(text == "python_param { param_str: \"'num_classes':2\\t'feat_stride': 16\" }");
}

TEST_CASE("replace_num_classes") {
  CHECK(replace_num_classes("'num_classes': 81", 3) ==
        std::pair<std::string, std::size_t>{"'num_classes': 3", 1});
  CHECK(replace_num_classes("'feat_stride': 16", 3).second == 0);
  CHECK(replace_num_classes("'num_classes': x", 3).second == 0);
  CHECK(replace_num_classes("'num_classes':1,'num_classes': 2", 9).first ==
        "'num_classes':9,'num_classes': 9");
}

TEST_CASE("verify reports inconsistencies") {
  PrototxtDocument ok = parse_prototxt(mini("train.prototxt"));
  CHECK(verify(ok).ok());
  CHECK(verify(ok, 80).ok());
  CHECK_FALSE(verify(ok, 2).ok());

  PrototxtDocument bad = parse_prototxt(
      "layer { name: 'cls_score' inner_product_param { num_output: 3 } }\n"
      "layer { name: 'bbox_pred' inner_product_param { num_output: 8 } }\n");
  VerifyReport r = verify(bad);
  REQUIRE(r.problems.size() == 1);
  CHECK(r.problems[0].find("4 x 3") != std::string::npos);

  CHECK_FALSE(verify(parse_prototxt("a: 1")).ok());
}

TEST_CASE("a NUL byte is not end of input") {
  CHECK_THROWS_AS(parse_prototxt(std::string("a: 1\0b: 2", 9)), SyntaxError);
  CHECK_THROWS_AS(parse_prototxt(std::string("\0", 1)), SyntaxError);
}
