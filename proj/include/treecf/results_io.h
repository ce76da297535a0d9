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

#ifndef TREECF_RESULTS_IO_H_
#define TREECF_RESULTS_IO_H_

// Output formats of the generators.
//
//   results JSON-lines, one object per instance:
//     {"index", "method", "valid", "distance", "iteration_found",
//      "x", "x_cf", "y", "y_cf"}
//   trace CSV:  iteration,mean_distance,mean_reported_distance,
//               cumulative_validity
//   sweep CSV:  sigma,tau,beta,alpha,validity_pct,d_mean

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "treecf/counterfactual.h"
#include "treecf/focus.h"

namespace treecf {

struct IndexedResult {
  size_t index = 0;
  std::string method;
  CounterfactualResult result;
};

std::string ResultToJsonLine(size_t index, std::string_view method,
                             const CounterfactualResult& result);
IndexedResult ResultFromJsonLine(std::string_view line);

void WriteResultsJsonl(const std::filesystem::path& path,
                       std::string_view method,
                       std::span<const CounterfactualResult> results);
// Throws LoadError naming the line on malformed input.
std::vector<IndexedResult> ReadResultsJsonl(const std::filesystem::path& path);

std::string TraceToCsv(std::span<const TracePoint> points);
std::string SweepToCsv(std::span<const SweepEntry> entries);

void WriteTextFile(const std::filesystem::path& path, std::string_view text);
std::string ReadTextFile(const std::filesystem::path& path);

}  // namespace treecf

#endif  // TREECF_RESULTS_IO_H_
