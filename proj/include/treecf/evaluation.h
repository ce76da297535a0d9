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

#ifndef TREECF_EVALUATION_H_
#define TREECF_EVALUATION_H_

// Comparison metrics between two sets of counterfactual examples for the
// same instances. Pairwise metrics are restricted to the instances where
// both methods produced a valid example; the size of that set is reported.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "treecf/counterfactual.h"
#include "treecf/distance.h"
#include "treecf/stats.h"

namespace treecf {

using Rows = std::vector<std::vector<double>>;

// (1/N) sum_n d(x_n, x_bar_n). Throws ArgumentError when empty or unpaired.
double MeanDistance(std::span<const std::vector<double>> originals,
                    std::span<const std::vector<double>> counterfactuals,
                    const Distance& distance);

struct RelativeDistance {
  double value = 0.0;     // Mean of d(x, x_bar) / d(x, x_bar_ref).
  size_t n_used = 0;
  size_t n_excluded = 0;  // Pairs with d(x, x_bar_ref) == 0.
};

RelativeDistance MeanRelativeDistance(
    std::span<const std::vector<double>> originals,
    std::span<const std::vector<double>> counterfactuals,
    std::span<const std::vector<double>> reference,
    const Distance& distance);

// Fraction of pairs with d(x, x_bar) < d(x, x_bar_ref), strictly. 0 for an
// empty set.
double PctCloser(std::span<const std::vector<double>> originals,
                 std::span<const std::vector<double>> counterfactuals,
                 std::span<const std::vector<double>> reference,
                 const Distance& distance);

enum class Significance { kImprovement, kLoss, kNone };

inline constexpr double kSignificanceLevel = 0.05;

std::string_view SignificanceName(Significance marker);

struct CellKey {
  std::string dataset;
  std::string model;
  std::string distance;
};

struct MethodRun {
  std::string method;
  std::vector<CounterfactualResult> results;
};

struct EvaluationReport {
  CellKey cell;
  std::string method;
  std::string reference;
  size_t n_total = 0;
  size_t n_valid_method = 0;
  size_t n_valid_reference = 0;
  size_t n_compared = 0;
  // All below are over the compared (both valid) instances.
  double d_mean_method = 0.0;
  double d_mean_reference = 0.0;
  RelativeDistance d_rmean;
  double pct_closer = 0.0;
  // NaN statistics when fewer than two instances are compared.
  TTestResult t_test;
  Significance marker = Significance::kNone;
  std::optional<double> fidelity;
};

// Throws ArgumentError when the runs differ in length or originals.
EvaluationReport ComparePair(const CellKey& cell, const MethodRun& method,
                             const MethodRun& reference,
                             const Distance& distance,
                             std::optional<double> fidelity = std::nullopt);

// Columns: dataset,model,distance,method,d_mean,d_Rmean_vs_<ref>,
// pct_closer_vs_<ref>,n_valid,n_compared,p_value,marker. Each report gives a
// row for its method and one for the reference (compared with itself). All
// reports must share a reference method.
std::string RenderReportCsv(std::span<const EvaluationReport> reports);

// Human-readable table grouped by metric and method, one block per cell.
// Markers: "v" significant improvement, "^" significant loss, "o" none.
std::string RenderReportTable(std::span<const EvaluationReport> reports);

}  // namespace treecf

#endif  // TREECF_EVALUATION_H_
