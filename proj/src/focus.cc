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

#include "treecf/focus.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "treecf/errors.h"
#include "treecf/parallel.h"

namespace treecf {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Halvings tried when a cosine step lands on the zero vector.
constexpr int kMaxStepHalvings = 60;

bool IsZero(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double e) { return e == 0.0; });
}

}  // namespace

void FocusConfig::Validate() const {
  params.Validate();
  if (!(std::isfinite(beta) && beta > 0.0)) {
    throw ArgumentError("beta must be finite and positive");
  }
  if (!(std::isfinite(learning_rate) && learning_rate > 0.0)) {
    throw ArgumentError("learning rate must be finite and positive");
  }
  if (iterations < 1) throw ArgumentError("iterations must be at least 1");
}

double PredictionLoss(const TreeEnsemble& ensemble,
                      const SoftEnsembleParams& params,
                      std::span<const double> x_bar, int y_x) {
  if (PredictLabel(ensemble, x_bar) != y_x) return 0.0;
  return SoftEnsemblePredict(ensemble, x_bar, params).probabilities.at(y_x);
}

double TotalLoss(const TreeEnsemble& ensemble, const FocusConfig& config,
                 std::span<const double> x, std::span<const double> x_bar) {
  const int y_x = PredictLabel(ensemble, x);
  return PredictionLoss(ensemble, config.params, x_bar, y_x) +
         config.beta * config.distance(x, x_bar);
}

std::vector<double> TotalLossGradient(const TreeEnsemble& ensemble,
                                      const FocusConfig& config,
                                      std::span<const double> x,
                                      std::span<const double> x_bar) {
  std::vector<double> gradient(x_bar.size(), 0.0);
  const int y_x = PredictLabel(ensemble, x);
  if (PredictLabel(ensemble, x_bar) == y_x) {
    SoftEnsembleEvaluator evaluator(ensemble, config.params);
    evaluator.AccumulateClassGradient(x_bar, y_x, 1.0, gradient);
  }
  config.distance.AccumulateGradient(x, x_bar, config.beta, gradient);
  return gradient;
}

CounterfactualResult GenerateCounterfactual(const TreeEnsemble& ensemble,
                                            const FocusConfig& config,
                                            std::span<const double> x,
                                            IterationTrace* trace) {
  config.Validate();
  CheckFinite(x);
  const size_t n_features = x.size();
  const int y_x = PredictLabel(ensemble, x);
  SoftEnsembleEvaluator evaluator(ensemble, config.params);

  CounterfactualResult best = InvalidResult(x, y_x);
  best.best_distance = std::numeric_limits<double>::infinity();

  std::vector<double> x_bar(x.begin(), x.end());
  std::vector<double> candidate(n_features);
  std::vector<double> gradient(n_features);
  std::vector<double> step(n_features);
  std::vector<double> first_moment(n_features, 0.0);
  std::vector<double> second_moment(n_features, 0.0);
  int label = y_x;
  double beta1_power = 1.0;
  double beta2_power = 1.0;

  if (trace != nullptr) {
    trace->distance.assign(config.iterations, 0.0);
    trace->best_distance.assign(config.iterations, kNaN);
  }

  for (int t = 1; t <= config.iterations; ++t) {
    std::fill(gradient.begin(), gradient.end(), 0.0);
    if (label == y_x) {
      evaluator.AccumulateClassGradient(x_bar, y_x, 1.0, gradient);
    }
    config.distance.AccumulateGradient(x, x_bar, config.beta, gradient);
    for (double g : gradient) {
      if (std::isnan(g)) {
        throw NumericError("NaN gradient at iteration " + std::to_string(t));
      }
    }

    beta1_power *= kAdamBeta1;
    beta2_power *= kAdamBeta2;
    for (size_t i = 0; i < n_features; ++i) {
      first_moment[i] =
          kAdamBeta1 * first_moment[i] + (1.0 - kAdamBeta1) * gradient[i];
      second_moment[i] = kAdamBeta2 * second_moment[i] +
                         (1.0 - kAdamBeta2) * gradient[i] * gradient[i];
      const double m_hat = first_moment[i] / (1.0 - beta1_power);
      const double v_hat = second_moment[i] / (1.0 - beta2_power);
      step[i] = config.learning_rate * m_hat / (std::sqrt(v_hat) + kAdamEpsilon);
    }

    double scale = 1.0;
    for (int attempt = 0;; ++attempt) {
      for (size_t i = 0; i < n_features; ++i) {
        candidate[i] = x_bar[i] - scale * step[i];
        if (config.clamp_to_unit_box) {
          candidate[i] = std::clamp(candidate[i], 0.0, 1.0);
        }
      }
      if (config.distance.kind() != DistanceKind::kCosine || !IsZero(candidate)) {
        break;
      }
      if (attempt == kMaxStepHalvings) {
        throw NumericError("cosine step stuck at the zero vector at iteration " +
                           std::to_string(t));
      }
      scale *= 0.5;
    }
    x_bar.swap(candidate);

    label = PredictLabel(ensemble, x_bar);
    const double d = config.distance(x, x_bar);
    if (label != y_x && d < best.best_distance) {
      best.counterfactual = x_bar;
      best.best_distance = d;
      best.valid = true;
      best.iteration_found = t;
      best.counterfactual_label = label;
    }
    if (trace != nullptr) {
      trace->distance[t - 1] = d;
      if (best.valid) trace->best_distance[t - 1] = best.best_distance;
    }
  }
  if (!best.valid) best.best_distance = 0.0;
  return best;
}

std::vector<CounterfactualResult> GenerateCounterfactuals(
    const TreeEnsemble& ensemble, const FocusConfig& config,
    std::span<const std::vector<double>> instances, int workers,
    std::vector<IterationTrace>* traces) {
  config.Validate();
  std::vector<CounterfactualResult> results(instances.size());
  if (traces != nullptr) traces->assign(instances.size(), {});
  ParallelFor(instances.size(), workers, [&](size_t i) {
    results[i] = GenerateCounterfactual(
        ensemble, config, instances[i],
        traces != nullptr ? &(*traces)[i] : nullptr);
  });
  return results;
}

std::vector<TracePoint> AggregateTraces(
    std::span<const IterationTrace> traces) {
  if (traces.empty()) return {};
  const size_t n_iterations = traces[0].distance.size();
  std::vector<TracePoint> points(n_iterations);
  for (size_t t = 0; t < n_iterations; ++t) {
    double sum = 0.0;
    double reported = 0.0;
    size_t found = 0;
    for (const IterationTrace& trace : traces) {
      if (trace.distance.size() != n_iterations) {
        throw ArgumentError("traces have different lengths");
      }
      sum += trace.distance[t];
      if (std::isnan(trace.best_distance[t])) {
        reported += trace.distance[t];
      } else {
        reported += trace.best_distance[t];
        ++found;
      }
    }
    const double n = static_cast<double>(traces.size());
    points[t] = {static_cast<int>(t + 1), sum / n, reported / n, found / n};
  }
  return points;
}

SweepGrid SweepGrid::Default() {
  return {{1, 5, 10, 50}, {1, 5, 10}, {0.01, 0.1}, {0.001, 0.01, 0.1}};
}

void SweepGrid::Validate() const {
  auto check = [](const std::vector<double>& axis, const char* name) {
    if (axis.empty()) {
      throw ArgumentError(std::string("sweep grid axis '") + name +
                          "' is empty");
    }
    for (double v : axis) {
      if (!(std::isfinite(v) && v > 0.0)) {
        throw ArgumentError(std::string("sweep grid axis '") + name +
                            "' has a non-positive value");
      }
    }
  };
  check(sigmas, "sigma");
  check(taus, "tau");
  check(betas, "beta");
  check(learning_rates, "alpha");
}

size_t SelectBestEntry(std::span<const SweepEntry> entries, bool* complete) {
  if (entries.empty()) throw ArgumentError("no sweep entries to select from");
  auto mean_or_inf = [](const SweepEntry& e) {
    return std::isnan(e.d_mean) ? std::numeric_limits<double>::infinity()
                                : e.d_mean;
  };
  size_t best = 0;
  for (size_t i = 1; i < entries.size(); ++i) {
    const SweepEntry& a = entries[i];
    const SweepEntry& b = entries[best];
    if (a.n_valid > b.n_valid ||
        (a.n_valid == b.n_valid && mean_or_inf(a) < mean_or_inf(b))) {
      best = i;
    }
  }
  if (complete != nullptr) {
    *complete = entries[best].n_valid == entries[best].n_total;
  }
  return best;
}

SweepOutcome SweepHyperparameters(const TreeEnsemble& ensemble,
                                  const SweepGrid& grid,
                                  std::span<const std::vector<double>> instances,
                                  const FocusConfig& base, int workers) {
  grid.Validate();
  if (instances.empty()) throw ArgumentError("sweep needs test instances");
  SweepOutcome outcome;
  std::vector<std::vector<CounterfactualResult>> all_results;
  for (double sigma : grid.sigmas) {
    for (double tau : grid.taus) {
      for (double beta : grid.betas) {
        for (double lr : grid.learning_rates) {
          SweepEntry entry;
          entry.config = base;
          entry.config.params = {sigma, tau};
          entry.config.beta = beta;
          entry.config.learning_rate = lr;
          auto results =
              GenerateCounterfactuals(ensemble, entry.config, instances, workers);
          double sum = 0.0;
          for (const auto& r : results) {
            if (!r.valid) continue;
            ++entry.n_valid;
            sum += r.best_distance;
          }
          entry.n_total = results.size();
          entry.d_mean = entry.n_valid == 0 ? kNaN : sum / entry.n_valid;
          outcome.entries.push_back(std::move(entry));
          all_results.push_back(std::move(results));
        }
      }
    }
  }
  outcome.best_index = SelectBestEntry(outcome.entries, &outcome.complete);
  outcome.best_results = std::move(all_results[outcome.best_index]);
  return outcome;
}

}  // namespace treecf
