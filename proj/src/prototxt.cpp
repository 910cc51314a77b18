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

#include "ftkit/prototxt.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>

#include "ftkit/error.hpp"

namespace ftkit::prototxt {
namespace {

bool is_ident_start(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
}
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }
bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}
// Characters that would glue onto a preceding identifier or number.
bool is_word_char(char c) {
  return is_ident_char(c) || c == '.' || c == '+' || c == '-';
}
bool is_hex(char c) {
  return is_digit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}
int hex_value(char c) {
  if (is_digit(c)) return c - '0';
  return (c | 0x20) - 'a' + 10;
}

std::string escape(std::string_view v, char quote) {
  std::string out;
  for (unsigned char c : v) {
    switch (c) {
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      case '\\': out += "\\\\"; break;
      default:
        if (c == static_cast<unsigned char>(quote)) {
          out += '\\';
          out += static_cast<char>(c);
        } else if (c < 0x20 || c == 0x7f) {
          const char oct[] = {'\\', static_cast<char>('0' + (c >> 6)),
                              static_cast<char>('0' + ((c >> 3) & 7)),
                              static_cast<char>('0' + (c & 7))};
          out.append(oct, 4);
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  return std::string(1, quote) + out + quote;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  PrototxtDocument parse() {
    PrototxtDocument doc;
    std::string trivia;
    parse_entries(doc.entries, trivia, '\0', 0);
    doc.trailing = std::move(trivia);
    return doc;
  }

 private:
  bool at_end() const { return pos_ >= src_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  [[noreturn]] void fail(std::size_t offset, const std::string& msg) const {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < offset && i < src_.size(); ++i) {
      if (src_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw SyntaxError(line, col, msg);
  }

  // Whitespace and comments. After a complete field one `;` or `,` is also
  // accepted as a separator.
  std::string scan_trivia(bool allow_separator) {
    std::size_t start = pos_;
    while (!at_end()) {
      char c = peek();
      if (is_space(c)) {
        ++pos_;
      } else if (c == '#') {
        while (!at_end() && peek() != '\n') ++pos_;
      } else if ((c == ';' || c == ',') && allow_separator) {
        allow_separator = false;
        ++pos_;
      } else {
        break;
      }
    }
    return std::string(src_.substr(start, pos_ - start));
  }

  // Parses entries until `close` (or end of input when close == '\0').
  // The trivia before the terminator is returned through `closing`.
  template <typename Closing>
  void parse_entries(std::vector<Entry>& out, Closing& closing, char close,
                     int depth) {
    bool after_field = false;
    while (true) {
      std::string trivia = scan_trivia(after_field);
      if (at_end()) {
        if (close != '\0') {
          fail(pos_, std::string("unbalanced braces: expected '") + close +
                         "' before end of input");
        }
        closing = std::move(trivia);
        return;
      }
      char c = peek();
      if (close != '\0' && c == close) {
        ++pos_;
        closing = std::move(trivia);
        return;
      }
      if (c == '}' || c == '>') {
        fail(pos_, std::string("unexpected '") + c + "'");
      }
      if (!is_ident_start(c)) {
        fail(pos_, "expected field name");
      }
      out.push_back(parse_entry(std::move(trivia), depth));
      after_field = true;
    }
  }

  Entry parse_entry(std::string leading, int depth) {
    Entry e;
    e.leading = std::move(leading);
    std::size_t start = pos_;
    while (!at_end() && is_ident_char(peek())) ++pos_;
    e.name = std::string(src_.substr(start, pos_ - start));

    std::size_t sep_start = pos_;
    scan_trivia(false);
    bool colon = false;
    if (peek() == ':') {
      colon = true;
      ++pos_;
      scan_trivia(false);
    }
    e.separator = std::string(src_.substr(sep_start, pos_ - sep_start));

    if (peek() == '{' || peek() == '<') {
      if (depth + 1 > kMaxDepth) fail(pos_, "nesting too deep");
      Message m;
      m.angle_brackets = peek() == '<';
      ++pos_;
      parse_entries(m.entries, m.closing, m.angle_brackets ? '>' : '}',
                    depth + 1);
      e.value = std::move(m);
      return e;
    }
    if (!colon) {
      fail(pos_, "expected ':' or '{' after field name '" + e.name + "'");
    }
    e.value = parse_scalar();
    return e;
  }

  ScalarValue parse_scalar() {
    if (at_end()) fail(pos_, "expected value before end of input");
    char c = peek();
    if (c == '"' || c == '\'') return parse_string(c);
    if (is_digit(c) || c == '-' || c == '.' || c == '+') return parse_number();
    if (is_ident_start(c)) {
      std::size_t start = pos_;
      while (!at_end() && is_ident_char(peek())) ++pos_;
      std::string word(src_.substr(start, pos_ - start));
      return ScalarValue::from_lexeme(ScalarValue::Kind::kIdentifier, word, 0,
                                      0, word, '"');
    }
    if (c == '[') fail(pos_, "list values are not supported");
    fail(pos_, "expected value");
  }

  ScalarValue parse_string(char quote) {
    std::size_t start = pos_;
    ++pos_;
    std::string text;
    while (true) {
      if (at_end() || peek() == '\n') fail(start, "unterminated string");
      char c = peek();
      if (c == quote) {
        ++pos_;
        break;
      }
      if (c != '\\') {
        text += c;
        ++pos_;
        continue;
      }
      std::size_t esc = pos_;
      ++pos_;
      if (at_end()) fail(start, "unterminated string");
      char e = peek();
      ++pos_;
      switch (e) {
        case 'a': text += '\a'; break;
        case 'b': text += '\b'; break;
        case 'f': text += '\f'; break;
        case 'n': text += '\n'; break;
        case 'r': text += '\r'; break;
        case 't': text += '\t'; break;
        case 'v': text += '\v'; break;
        case '\\': text += '\\'; break;
        case '\'': text += '\''; break;
        case '"': text += '"'; break;
        case '?': text += '?'; break;
        case 'x': {
          if (!is_hex(peek())) fail(esc, "invalid hex escape");
          int v = 0;
          for (int i = 0; i < 2 && is_hex(peek()); ++i) {
            v = v * 16 + hex_value(peek());
            ++pos_;
          }
          text += static_cast<char>(v);
          break;
        }
        default:
          if (e >= '0' && e <= '7') {
            int v = e - '0';
            for (int i = 0; i < 2 && peek() >= '0' && peek() <= '7'; ++i) {
              v = v * 8 + (peek() - '0');
              ++pos_;
            }
            if (v > 0xff) fail(esc, "octal escape out of range");
            text += static_cast<char>(v);
          } else {
            fail(esc, "invalid escape sequence");
          }
      }
    }
    return ScalarValue::from_lexeme(ScalarValue::Kind::kString,
                                    std::string(src_.substr(start, pos_ - start)),
                                    0, 0, std::move(text), quote);
  }

  ScalarValue parse_number() {
    std::size_t start = pos_;
    if (peek() == '-' || peek() == '+') ++pos_;
    if (is_ident_start(peek())) {
      // Signed identifier: -inf, -nan and friends.
      while (!at_end() && is_ident_char(peek())) ++pos_;
      std::string word(src_.substr(start, pos_ - start));
      return ScalarValue::from_lexeme(ScalarValue::Kind::kIdentifier, word, 0,
                                      0, word, '"');
    }
    while (!at_end()) {
      char c = peek();
      char prev = src_[pos_ - 1];
      bool exponent_sign = (c == '+' || c == '-') &&
                           (prev == 'e' || prev == 'E') && !lexeme_is_hex(start);
      if (is_ident_char(c) || c == '.' || exponent_sign) {
        ++pos_;
      } else {
        break;
      }
    }
    std::string lex(src_.substr(start, pos_ - start));
    std::string_view body = lex;
    bool negative = false;
    if (!body.empty() && (body[0] == '-' || body[0] == '+')) {
      negative = body[0] == '-';
      body.remove_prefix(1);
    }
    if (body.empty()) fail(start, "invalid number '" + lex + "'");

    // Integers: decimal, 0x hex, leading-zero octal.
    int base = 10;
    std::string_view digits = body;
    if (body.size() > 2 && body[0] == '0' && (body[1] == 'x' || body[1] == 'X')) {
      base = 16;
      digits = body.substr(2);
    } else if (body.size() > 1 && body[0] == '0' &&
               std::all_of(body.begin(), body.end(), is_digit)) {
      base = 8;
      digits = body.substr(1);
    }
    bool all_digits = !digits.empty() &&
                      std::all_of(digits.begin(), digits.end(), [&](char ch) {
                        return base == 16 ? is_hex(ch)
                                          : (base == 8 ? ch >= '0' && ch <= '7'
                                                       : is_digit(ch));
                      });
    if (base == 8 && !all_digits) fail(start, "invalid octal number '" + lex + "'");
    if (all_digits) {
      std::uint64_t mag = 0;
      auto [p, ec] =
          std::from_chars(digits.data(), digits.data() + digits.size(), mag, base);
      if (ec == std::errc() && p == digits.data() + digits.size()) {
        if (!negative && mag <= static_cast<std::uint64_t>(INT64_MAX)) {
          return ScalarValue::from_lexeme(ScalarValue::Kind::kInteger, lex,
                                          static_cast<std::int64_t>(mag),
                                          static_cast<double>(mag), "", '"');
        }
        if (negative && mag <= static_cast<std::uint64_t>(INT64_MAX) + 1) {
          std::int64_t v = mag == static_cast<std::uint64_t>(INT64_MAX) + 1
                               ? INT64_MIN
                               : -static_cast<std::int64_t>(mag);
          return ScalarValue::from_lexeme(ScalarValue::Kind::kInteger, lex, v,
                                          static_cast<double>(v), "", '"');
        }
      }
      if (base != 10) fail(start, "integer out of range '" + lex + "'");
    }

    // Reals, with an optional f/F suffix.
    std::string_view real_body = body;
    if (!real_body.empty() && (real_body.back() == 'f' || real_body.back() == 'F')) {
      real_body.remove_suffix(1);
    }
    bool shape_ok = !real_body.empty() &&
                    std::all_of(real_body.begin(), real_body.end(), [](char ch) {
                      return is_digit(ch) || ch == '.' || ch == 'e' || ch == 'E' ||
                             ch == '+' || ch == '-';
                    }) &&
                    std::any_of(real_body.begin(), real_body.end(), is_digit);
    double v = 0;
    if (shape_ok) {
      auto [p, ec] = std::from_chars(real_body.data(),
                                     real_body.data() + real_body.size(), v,
                                     std::chars_format::general);
      shape_ok = p == real_body.data() + real_body.size() &&
                 (ec == std::errc() || ec == std::errc::result_out_of_range);
    }
    if (!shape_ok) fail(start, "invalid number '" + lex + "'");
    return ScalarValue::from_lexeme(ScalarValue::Kind::kReal, lex, 0,
                                    negative ? -v : v, "", '"');
  }

  bool lexeme_is_hex(std::size_t start) const {
    std::size_t i = start;
    if (src_[i] == '-' || src_[i] == '+') ++i;
    return i + 1 < src_.size() && src_[i] == '0' &&
           (src_[i + 1] == 'x' || src_[i + 1] == 'X');
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

// Serializer that optionally records the line on which each scalar starts.
class Writer {
 public:
  explicit Writer(std::map<EntryPath, int>* lines = nullptr) : lines_(lines) {}

  void entries(const std::vector<Entry>& list, EntryPath& path) {
    for (std::size_t i = 0; i < list.size(); ++i) {
      path.push_back(i);
      entry(list[i], path);
      path.pop_back();
    }
  }

  void raw(std::string_view s) {
    out_.append(s);
    line_ += static_cast<int>(std::count(s.begin(), s.end(), '\n'));
  }

  std::string take() { return std::move(out_); }

 private:
  void newline(std::size_t depth) {
    if (out_.empty()) return;
    raw("\n");
    raw(std::string(2 * depth, ' '));
  }

  void entry(const Entry& e, EntryPath& path) {
    const std::size_t depth = path.size() - 1;
    if (!e.leading) {
      newline(depth);
    } else if (e.leading->empty() && !out_.empty() && is_word_char(out_.back())) {
      raw(" ");
    } else {
      raw(*e.leading);
    }
    raw(e.name);
    if (const auto* m = std::get_if<Message>(&e.value)) {
      raw(e.separator);
      raw(m->angle_brackets ? "<" : "{");
      entries(m->entries, path);
      if (m->closing) {
        raw(*m->closing);
      } else if (!m->entries.empty()) {
        newline(depth);
      }
      raw(m->angle_brackets ? ">" : "}");
    } else {
      raw(e.separator.find(':') == std::string::npos ? ": " : e.separator);
      if (lines_) (*lines_)[path] = line_;
      raw(std::get<ScalarValue>(e.value).lexeme());
    }
  }

  std::string out_;
  int line_ = 1;
  std::map<EntryPath, int>* lines_;
};

const Entry* entry_at(const PrototxtDocument& doc, const EntryPath& path) {
  const std::vector<Entry>* list = &doc.entries;
  const Entry* e = nullptr;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (path[i] >= list->size()) return nullptr;
    e = &(*list)[path[i]];
    if (i + 1 < path.size()) {
      if (!e->is_message()) return nullptr;
      list = &e->message().entries;
    }
  }
  return e;
}

Entry* entry_at(PrototxtDocument& doc, const EntryPath& path) {
  return const_cast<Entry*>(
      entry_at(static_cast<const PrototxtDocument&>(doc), path));
}

// The integer following each `'num_classes':` token, in order.
std::vector<std::int64_t> num_classes_values(std::string_view s) {
  static constexpr std::string_view kToken = "'num_classes':";
  std::vector<std::int64_t> out;
  for (std::size_t at = s.find(kToken); at != std::string_view::npos;
       at = s.find(kToken, at + 1)) {
    std::size_t i = at + kToken.size();
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data() + i, s.data() + s.size(), v);
    if (ec == std::errc() && p != s.data() + i) out.push_back(v);
  }
  return out;
}

void collect_sites(const std::vector<Entry>& list, EntryPath& path, int k,
                   std::vector<RewriteSite>& out) {
  const std::int64_t classes = static_cast<std::int64_t>(k) + 1;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const Entry& e = list[i];
    path.push_back(i);
    if (e.is_message()) {
      const auto& children = e.message().entries;
      if (e.name == "layer") {
        const Entry* name = find_field(children, "name");
        std::optional<RewriteRule> rule;
        if (name && !name->is_message() &&
            name->scalar().kind() == ScalarValue::Kind::kString) {
          if (name->scalar().text() == "cls_score") {
            rule = RewriteRule::kClsScoreOutputs;
          } else if (name->scalar().text() == "bbox_pred") {
            rule = RewriteRule::kBboxPredOutputs;
          }
        }
        if (rule) {
          std::int64_t target =
              *rule == RewriteRule::kClsScoreOutputs ? classes : 4 * classes;
          for (std::size_t j = 0; j < children.size(); ++j) {
            if (children[j].name != "inner_product_param" ||
                !children[j].is_message()) {
              continue;
            }
            const auto& params = children[j].message().entries;
            for (std::size_t n = 0; n < params.size(); ++n) {
              if (params[n].name != "num_output" || params[n].is_message()) {
                continue;
              }
              EntryPath site = path;
              site.push_back(j);
              site.push_back(n);
              out.push_back({*rule, std::move(site), 0, params[n].scalar(),
                             ScalarValue::integer(target)});
            }
          }
        }
      }
      if (e.name == "python_param") {
        for (std::size_t j = 0; j < children.size(); ++j) {
          const Entry& c = children[j];
          if (c.name != "param_str" || c.is_message() ||
              c.scalar().kind() != ScalarValue::Kind::kString) {
            continue;
          }
          const ScalarValue& old = c.scalar();
          auto [text, count] = replace_num_classes(old.text(), classes);
          if (count == 0) continue;
          // Edit the lexeme in place when the token appears unescaped there,
          // so escapes elsewhere in the string keep their spelling.
          auto [lexeme, lex_count] = replace_num_classes(old.lexeme(), classes);
          ScalarValue updated = ScalarValue::string(text, old.quote());
          if (lex_count == count) {
            try {
              PrototxtDocument probe = parse_prototxt("v: " + lexeme);
              if (probe.entries.size() == 1 &&
                  probe.entries[0].scalar().text() == text) {
                updated = probe.entries[0].scalar();
              }
            } catch (const SyntaxError&) {
            }
          }
          EntryPath site = path;
          site.push_back(j);
          out.push_back({RewriteRule::kParamStrClasses, std::move(site), 0, old,
                         std::move(updated)});
        }
      }
      collect_sites(children, path, k, out);
    }
    path.pop_back();
  }
}

void collect_values(const std::vector<Entry>& list, VerifyReport& r) {
  for (const Entry& e : list) {
    if (!e.is_message()) continue;
    const auto& children = e.message().entries;
    if (e.name == "layer") {
      const Entry* name = find_field(children, "name");
      if (name && !name->is_message() &&
          name->scalar().kind() == ScalarValue::Kind::kString &&
          (name->scalar().text() == "cls_score" ||
           name->scalar().text() == "bbox_pred")) {
        bool cls = name->scalar().text() == "cls_score";
        for (const Entry* p : find_fields(children, "inner_product_param")) {
          if (!p->is_message()) continue;
          for (const Entry* n : find_fields(p->message().entries, "num_output")) {
            if (n->is_message() ||
                n->scalar().kind() != ScalarValue::Kind::kInteger) {
              r.problems.push_back(name->scalar().text() +
                                   " num_output is not an integer");
              continue;
            }
            (cls ? r.cls_score_outputs : r.bbox_pred_outputs)
                .push_back(n->scalar().as_integer());
          }
        }
      }
    }
    if (e.name == "python_param") {
      for (const Entry* s : find_fields(children, "param_str")) {
        if (s->is_message() || s->scalar().kind() != ScalarValue::Kind::kString) {
          continue;
        }
        for (std::int64_t v : num_classes_values(s->scalar().text())) {
          r.param_str_classes.push_back(v);
        }
      }
    }
    collect_values(children, r);
  }
}

}  // namespace

ScalarValue ScalarValue::integer(std::int64_t v) {
  return from_lexeme(Kind::kInteger, std::to_string(v), v,
                     static_cast<double>(v), "", '"');
}

ScalarValue ScalarValue::real(double v) {
  if (!std::isfinite(v)) {
    throw ContractViolation("prototxt real values must be finite");
  }
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  std::string lex(buf, p);
  if (lex.find_first_of(".e") == std::string::npos) lex += ".0";
  return from_lexeme(Kind::kReal, std::move(lex), 0, v, "", '"');
}

ScalarValue ScalarValue::string(std::string v, char quote) {
  if (quote != '"' && quote != '\'') {
    throw ContractViolation("string quote must be ' or \"");
  }
  std::string lex = escape(v, quote);
  return from_lexeme(Kind::kString, std::move(lex), 0, 0, std::move(v), quote);
}

ScalarValue ScalarValue::identifier(std::string v) {
  if (v.empty() || !is_ident_start(v[0]) ||
      !std::all_of(v.begin(), v.end(), is_ident_char)) {
    throw ContractViolation("not an identifier: '" + v + "'");
  }
  return from_lexeme(Kind::kIdentifier, v, 0, 0, v, '"');
}

ScalarValue ScalarValue::from_lexeme(Kind kind, std::string lexeme,
                                     std::int64_t i, double r, std::string text,
                                     char quote) {
  ScalarValue s;
  s.kind_ = kind;
  s.lexeme_ = std::move(lexeme);
  s.integer_ = i;
  s.real_ = r;
  s.text_ = std::move(text);
  s.quote_ = quote;
  return s;
}

Entry Entry::scalar_field(std::string name, ScalarValue v) {
  return Entry{std::nullopt, std::move(name), ": ", std::move(v)};
}

Entry Entry::message_field(std::string name, std::vector<Entry> children) {
  return Entry{std::nullopt, std::move(name), " ",
               Message{std::move(children), std::nullopt, false}};
}

PrototxtDocument parse_prototxt(std::string_view source) {
  return Parser(source).parse();
}

std::string serialize_prototxt(const PrototxtDocument& doc) {
  Writer w;
  EntryPath path;
  w.entries(doc.entries, path);
  w.raw(doc.trailing);
  return w.take();
}

const Entry* find_field(const std::vector<Entry>& entries, std::string_view name) {
  for (const auto& e : entries) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

std::vector<const Entry*> find_fields(const std::vector<Entry>& entries,
                                      std::string_view name) {
  std::vector<const Entry*> out;
  for (const auto& e : entries) {
    if (e.name == name) out.push_back(&e);
  }
  return out;
}

const char* rule_name(RewriteRule rule) {
  switch (rule) {
    case RewriteRule::kClsScoreOutputs: return "cls_score";
    case RewriteRule::kBboxPredOutputs: return "bbox_pred";
    case RewriteRule::kParamStrClasses: return "param_str";
  }
  return "unknown";
}

std::size_t RewritePlan::planned(RewriteRule rule) const {
  return std::count_if(sites.begin(), sites.end(),
                       [rule](const RewriteSite& s) { return s.rule == rule; });
}

std::size_t RewritePlan::total_applied() const {
  return std::accumulate(applied.begin(), applied.end(), std::size_t{0});
}

std::pair<std::string, std::size_t> replace_num_classes(std::string_view s,
                                                        std::int64_t value) {
  static constexpr std::string_view kToken = "'num_classes':";
  std::string out;
  std::size_t count = 0;
  std::size_t copied = 0;
  for (std::size_t at = s.find(kToken); at != std::string_view::npos;
       at = s.find(kToken, at + 1)) {
    std::size_t i = at + kToken.size();
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t digits = i;
    if (digits < s.size() && s[digits] == '-') ++digits;
    std::size_t end = digits;
    while (end < s.size() && is_digit(s[end])) ++end;
    if (end == digits) continue;
    out.append(s.substr(copied, i - copied));
    out += std::to_string(value);
    copied = end;
    ++count;
  }
  out.append(s.substr(copied));
  return {std::move(out), count};
}

RewritePlan plan_rewrites(const PrototxtDocument& doc, int k) {
  if (k < 1) throw ContractViolation("category count must be >= 1");
  RewritePlan plan;
  plan.k = k;
  EntryPath path;
  collect_sites(doc.entries, path, k, plan.sites);

  std::map<EntryPath, int> lines;
  Writer w(&lines);
  w.entries(doc.entries, path);
  for (auto& site : plan.sites) site.line = lines[site.path];
  return plan;
}

RewriteOutcome apply_rewrites(const PrototxtDocument& doc,
                              const RewritePlan& plan) {
  if (plan.sites.empty()) {
    throw EmptyResultError(
        "no rewrite targets found (expected cls_score/bbox_pred layers or a "
        "python_param with 'num_classes')");
  }
  RewriteOutcome r{doc, plan};
  r.plan.applied = {};
  for (const auto& site : plan.sites) {
    Entry* e = entry_at(r.document, site.path);
    if (!e || e->is_message() || !(e->scalar() == site.old_value)) {
      throw ContractViolation("rewrite plan does not match the document");
    }
    e->value = site.new_value;
    ++r.plan.applied[static_cast<std::size_t>(site.rule)];
  }
  return r;
}

VerifyReport verify(const PrototxtDocument& doc, std::optional<int> k) {
  VerifyReport r;
  collect_values(doc.entries, r);
  if (r.cls_score_outputs.empty() && r.bbox_pred_outputs.empty() &&
      r.param_str_classes.empty()) {
    r.problems.push_back("no category-dependent parameters found");
    return r;
  }
  if (r.cls_score_outputs.empty()) {
    if (!r.bbox_pred_outputs.empty()) {
      r.problems.push_back("bbox_pred present but cls_score num_output missing");
    }
    // A data-layer-only file can still be checked against k.
    if (k) {
      for (std::int64_t v : r.param_str_classes) {
        if (v != *k + 1) {
          r.problems.push_back("param_str num_classes " + std::to_string(v) +
                               " != " + std::to_string(*k + 1));
        }
      }
    }
    return r;
  }
  const std::int64_t classes = r.cls_score_outputs.front();
  for (std::int64_t v : r.cls_score_outputs) {
    if (v != classes) {
      r.problems.push_back("cls_score num_output values disagree");
      break;
    }
  }
  if (k && classes != *k + 1) {
    r.problems.push_back("cls_score num_output " + std::to_string(classes) +
                         " != " + std::to_string(*k + 1));
  }
  for (std::int64_t v : r.bbox_pred_outputs) {
    if (v != 4 * classes) {
      r.problems.push_back("bbox_pred num_output " + std::to_string(v) +
                           " != 4 x " + std::to_string(classes));
    }
  }
  for (std::int64_t v : r.param_str_classes) {
    if (v != classes) {
      r.problems.push_back("param_str num_classes " + std::to_string(v) +
                           " != cls_score num_output " + std::to_string(classes));
    }
  }
  return r;
}

}  // namespace ftkit::prototxt
