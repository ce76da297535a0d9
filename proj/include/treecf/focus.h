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

#ifndef TREECF_FOCUS_H_
#define TREECF_FOCUS_H_

// Counterfactual search by gradient descent on the relaxed ensemble.
//
// The loss for a candidate x_bar of instance x with hard label y is
//
//   L(x_bar) = 1[hard(x_bar) == y] * M~(y | x_bar) + beta * d(x, x_bar)
//
// The indicator is evaluated on the hard model and acts as a gate with no
// gradient; once the hard prediction flips only the distance term pulls.

#include <cstddef>
#include <span>
#include <vector>

#include "treecf/counterfactual.h"
#include "treecf/distance.h"
#include "treecf/model.h"
#include "treecf/soft_model.h"

namespace treecf {

struct FocusConfig {
  SoftEnsembleParams params;
  double beta = 0.1;
  double learning_rate = 0.01;
  int iterations = 1000;
  Distance distance = Distance::Euclidean();
  // Project x_bar onto [0, 1]^F after every step.
  bool clamp_to_unit_box = false;

  // Throws ArgumentError on out-of-domain values.
  void Validate() const;
};

// Adam constants.
inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEpsilon = 1e-8;

// 1[y_x == hard(x_bar)] * M~(y_x | x_bar).
double PredictionLoss(const TreeEnsemble& ensemble,
                      const SoftEnsembleParams& params,
                      std::span<const double> x_bar, int y_x);

double TotalLoss(const TreeEnsemble& ensemble, const FocusConfig& config,
                 std::span<const double> x, std::span<const double> x_bar);

// Gradient of TotalLoss with respect to x_bar, indicator held constant.
std::vector<double> TotalLossGradient(const TreeEnsemble& ensemble,
                                      const FocusConfig& config,
                                      std::span<const double> x,
                                      std::span<const double> x_bar);

// Per-iteration record of one search.
struct IterationTrace {
  std::vector<double> distance;       // d(x, x_bar_t) after step t.
  std::vector<double> best_distance;  // Best valid so far, NaN before any.
};

// Runs `config.iterations` Adam steps from x_bar_0 = x and returns the
// closest valid x_bar seen after any step. Throws NumericError naming the
// iteration if a gradient turns NaN.
CounterfactualResult GenerateCounterfactual(const TreeEnsemble& ensemble,
                                            const FocusConfig& config,
                                            std::span<const double> x,
                                            IterationTrace* trace = nullptr);

// Independent searches for every instance, in instance order. `traces`, if
// given, is resized to one entry per instance. workers == 0 uses the
// hardware concurrency.
std::vector<CounterfactualResult> GenerateCounterfactuals(
    const TreeEnsemble& ensemble, const FocusConfig& config,
    std::span<const std::vector<double>> instances, int workers = 0,
    std::vector<IterationTrace>* traces = nullptr);

// Mean over instances at one iteration.
struct TracePoint {
  int iteration = 0;
  // Mean d(x, x_bar_t) over all instances.
  double mean_distance = 0.0;
  // Mean of the best valid distance where one exists, else d(x, x_bar_t).
  double mean_reported_distance = 0.0;
  // Fraction of instances with a valid x_bar found at or before t.
  double cumulative_validity = 0.0;
};

std::vector<TracePoint> AggregateTraces(
    std::span<const IterationTrace> traces);

struct SweepGrid {
  std::vector<double> sigmas;
  std::vector<double> taus;
  std::vector<double> betas;
  std::vector<double> learning_rates;

  // sigma {1, 5, 10, 50}, tau {1, 5, 10}, beta {0.01, 0.1},
  // learning rate {0.001, 0.01, 0.1}.
  static SweepGrid Default();
  // Throws ArgumentError for an empty axis or a non-positive value.
  void Validate() const;
  size_t size() const {
    return sigmas.size() * taus.size() * betas.size() * learning_rates.size();
  }
};

struct SweepEntry {
  FocusConfig config;
  size_t n_valid = 0;
  size_t n_total = 0;
  double d_mean = 0.0;  // Over valid results; NaN when none are valid.

  double validity_pct() const {
    return n_total == 0 ? 0.0 : 100.0 * n_valid / n_total;
  }
};

struct SweepOutcome {
  std::vector<SweepEntry> entries;  // Grid order: sigma, tau, beta, lr.
  size_t best_index = 0;
  // False when no configuration was valid for every instance.
  bool complete = false;
  std::vector<CounterfactualResult> best_results;

  const SweepEntry& best() const { return entries[best_index]; }
};

// Selection rule: among entries valid for every instance, the smallest
// d_mean; otherwise the most valid results, ties to the smaller d_mean.
// Remaining ties keep the earlier entry. Throws ArgumentError when empty.
size_t SelectBestEntry(std::span<const SweepEntry> entries, bool* complete);

// Evaluates every grid point. `base` supplies the distance, iteration
// budget and clamp flag.
SweepOutcome SweepHyperparameters(const TreeEnsemble& ensemble,
                                  const SweepGrid& grid,
                                  std::span<const std::vector<double>> instances,
                                  const FocusConfig& base, int workers = 0);

}  // namespace treecf

#endif  // TREECF_FOCUS_H_
