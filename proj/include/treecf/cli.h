/*
 * Copyright 2026 The treecf Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef TREECF_CLI_H_
#define TREECF_CLI_H_

#include <ostream>

namespace treecf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;

// Entry point of the `treecf` tool. Subcommands: generate, sweep, evaluate,
// fidelity, export-fig3-trace. Returns the process exit code.
int Run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);

}  // namespace treecf::cli

#endif  // TREECF_CLI_H_
