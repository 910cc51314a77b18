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

#ifndef FTKIT_CLI_HPP_
#define FTKIT_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

#include "ftkit/error.hpp"

namespace ftkit::cli {

// Exit codes; one per error class.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitEmpty = 3;

int exit_code_for(ErrorKind kind);

// Runs one command line. `args[0]` is the program name. Machine-readable
// results go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace ftkit::cli

#endif  // FTKIT_CLI_HPP_
