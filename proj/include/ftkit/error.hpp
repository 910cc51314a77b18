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

#ifndef FTKIT_ERROR_HPP_
#define FTKIT_ERROR_HPP_

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ftkit {

// Error classes. Each maps to exactly one CLI exit code.
enum class ErrorKind {
  kUsage,      // bad flags or arguments
  kData,       // malformed input, schema, integrity or config problems
  kEmpty,      // the operation would produce an empty result
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Malformed JSON input. `offset` is the byte offset reported by the parser.
class JsonParseError : public Error {
 public:
  JsonParseError(std::size_t offset, const std::string& what)
      : Error(ErrorKind::kData, what), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// A required key is missing or a value has the wrong type or range.
class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& what) : Error(ErrorKind::kData, what) {}
};

// Dangling references or duplicate ids. `ids` lists the offending record ids.
class IntegrityError : public Error {
 public:
  IntegrityError(const std::string& what, std::vector<std::int64_t> ids = {})
      : Error(ErrorKind::kData, what), ids_(std::move(ids)) {}
  const std::vector<std::int64_t>& ids() const { return ids_; }

 private:
  std::vector<std::int64_t> ids_;
};

// Invalid CAT_IDS or other configuration. `line` is 1-based, 0 if unknown.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = 0)
      : Error(ErrorKind::kData, what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Lexical or syntax error in text-format input; 1-based line and column.
class SyntaxError : public Error {
 public:
  // `source` (a file name) prefixes the message when given.
  SyntaxError(int line, int column, const std::string& message,
              const std::string& source = "")
      : Error(ErrorKind::kData, (source.empty() ? "" : source + ":") +
                                    std::to_string(line) + ":" +
                                    std::to_string(column) + ": " + message),
        line_(line),
        column_(column),
        message_(message) {}
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  int line_;
  int column_;
  std::string message_;
};

// Empty subset, no rewrite targets, too few eligible demo images.
class EmptyResultError : public Error {
 public:
  explicit EmptyResultError(const std::string& what)
      : Error(ErrorKind::kEmpty, what) {}
};

// A caller broke a documented precondition (e.g. degenerate box given to iou).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace ftkit

#endif  // FTKIT_ERROR_HPP_
