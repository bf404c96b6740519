// Copyright 2026 The twrcr Authors
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

#ifndef TWRCR_CLI_HPP
#define TWRCR_CLI_HPP

#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace twrcr::cli {

// Exit codes: 0 success, 2 config error, 3 infeasible, 4 solver non-convergence.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitInfeasible = 3;
inline constexpr int kExitNoConvergence = 4;

/// Parses a "key = value" text file ('#' starts a comment, blank lines
/// ignored). Throws std::runtime_error with a diagnostic on malformed lines.
std::map<std::string, std::string> parse_config_file(const std::string& path);

/// Entry point behind the twrcr binary; also directly testable.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace twrcr::cli

#endif  // TWRCR_CLI_HPP
