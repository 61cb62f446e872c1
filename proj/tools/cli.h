// Copyright 2026 The admitsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ADMITSIM_TOOLS_CLI_H_
#define ADMITSIM_TOOLS_CLI_H_

#include <iosfwd>

namespace admitsim::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // domain failure or a check that does not hold
inline constexpr int kExitUsage = 2;

/// Runs one subcommand. Reports go to files named by --out; human-readable
/// summaries to `out`; machine-readable diagnostics (one JSON object) to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace admitsim::cli

#endif  // ADMITSIM_TOOLS_CLI_H_
