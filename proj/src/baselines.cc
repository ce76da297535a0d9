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

#include "treecf/baselines.h"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "treecf/errors.h"
#include "treecf/parallel.h"

namespace treecf {

std::vector<double> FtConfig::DefaultEpsilonGrid() {
  return {0.001, 0.005, 0.01, 0.1};
}

void FtConfig::Validate() const {
  if (!(std::isfinite(epsilon) && epsilon > 0.0)) {
    throw ArgumentError("epsilon must be finite and positive");
  }
}

void RpConfig::Validate() const {
  if (samples < 1) throw ArgumentError("samples must be at least 1");
  if (!(std::isfinite(noise_std) && noise_std > 0.0)) {
    throw ArgumentError("noise std must be finite and positive");
  }
}

std::vector<int> FtChangingLeaves(const DecisionTree& tree, int y_x) {
  std::vector<int> leaves;
  for (const TreeNode& node : tree.nodes()) {
    if (node.is_leaf() && ArgMax(node.distribution) != y_x) {
      leaves.push_back(node.id);
    }
  }
  return leaves;
}

std::vector<double> FtPerturbToLeaf(const DecisionTree& tree, int leaf_id,
                                    std::span<const double> x,
                                    double epsilon) {
  if (!tree.node(leaf_id).is_leaf()) {
    throw ArgumentError("node " + std::to_string(leaf_id) + " is not a leaf");
  }
  std::vector<double> x_bar(x.begin(), x.end());
  const std::vector<int> path = tree.PathTo(leaf_id);
  for (size_t k = 0; k + 1 < path.size(); ++k) {
    const TreeNode& split = tree.node(path[k]);
    double& value = x_bar.at(split.feature);
    if (split.left == path[k + 1]) {
      if (!(value >= split.threshold + epsilon)) {
        value = split.threshold + epsilon;
      }
    } else if (!(value <= split.threshold - epsilon)) {
      value = split.threshold - epsilon;
    }
  }
  if (NodeActivation(tree, leaf_id, x_bar) != 1) {
    throw StructuralError("path to leaf " + std::to_string(leaf_id) +
                          " cannot be satisfied with epsilon " +
                          std::to_string(epsilon));
  }
  return x_bar;
}

CounterfactualResult FtGenerate(const TreeEnsemble& ensemble,
                                const FtConfig& config,
                                std::span<const double> x,
                                const Distance& distance) {
  config.Validate();
  CheckFinite(x);
  const int y_x = PredictLabel(ensemble, x);
  CounterfactualResult best = InvalidResult(x, y_x);
  double best_distance = std::numeric_limits<double>::infinity();
  int candidate_number = 0;
  for (const DecisionTree& tree : ensemble.trees()) {
    for (int leaf_id : FtChangingLeaves(tree, y_x)) {
      ++candidate_number;
      std::vector<double> candidate;
      try {
        candidate = FtPerturbToLeaf(tree, leaf_id, x, config.epsilon);
      } catch (const StructuralError&) {
        continue;
      }
      const int label = PredictLabel(ensemble, candidate);
      if (label == y_x) continue;
      const double d = distance(x, candidate);
      if (d < best_distance) {
        best_distance = d;
        best.counterfactual = std::move(candidate);
        best.valid = true;
        best.best_distance = d;
        best.iteration_found = candidate_number;
        best.counterfactual_label = label;
      }
    }
  }
  return best;
}

std::vector<CounterfactualResult> FtGenerateAll(
    const TreeEnsemble& ensemble, const FtConfig& config,
    std::span<const std::vector<double>> instances, const Distance& distance,
    int workers) {
  std::vector<CounterfactualResult> results(instances.size());
  ParallelFor(instances.size(), workers, [&](size_t i) {
    results[i] = FtGenerate(ensemble, config, instances[i], distance);
  });
  return results;
}

FtSelection FtSelectEpsilon(const TreeEnsemble& ensemble,
                            std::span<const double> epsilons,
                            std::span<const std::vector<double>> instances,
                            const Distance& distance, int workers) {
  if (epsilons.empty()) throw ArgumentError("empty epsilon grid");
  FtSelection best;
  size_t best_valid = 0;
  double best_mean = std::numeric_limits<double>::infinity();
  bool first = true;
  for (double epsilon : epsilons) {
    auto results =
        FtGenerateAll(ensemble, FtConfig{epsilon}, instances, distance, workers);
    size_t n_valid = 0;
    double sum = 0.0;
    for (const auto& r : results) {
      if (r.valid) {
        ++n_valid;
        sum += r.best_distance;
      }
    }
    const double mean = n_valid == 0 ? std::numeric_limits<double>::infinity()
                                     : sum / n_valid;
    if (first || n_valid > best_valid ||
        (n_valid == best_valid && mean < best_mean)) {
      first = false;
      best_valid = n_valid;
      best_mean = mean;
      best.epsilon = epsilon;
      best.results = std::move(results);
    }
  }
  return best;
}

CounterfactualResult RpGenerate(const TreeEnsemble& ensemble,
                                const RpConfig& config,
                                std::span<const double> x,
                                const Distance& distance) {
  config.Validate();
  CheckFinite(x);
  const int y_x = PredictLabel(ensemble, x);
  CounterfactualResult best = InvalidResult(x, y_x);
  double best_distance = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> noise(0.0, config.noise_std);
  std::vector<double> sample(x.size());
  for (int s = 1; s <= config.samples; ++s) {
    for (size_t i = 0; i < x.size(); ++i) sample[i] = x[i] + noise(rng);
    const int label = PredictLabel(ensemble, sample);
    if (label == y_x) continue;
    const double d = distance(x, sample);
    if (d < best_distance) {
      best_distance = d;
      best.counterfactual = sample;
      best.valid = true;
      best.best_distance = d;
      best.iteration_found = s;
      best.counterfactual_label = label;
    }
  }
  return best;
}

std::vector<CounterfactualResult> RpGenerateAll(
    const TreeEnsemble& ensemble, const RpConfig& config,
    std::span<const std::vector<double>> instances, const Distance& distance,
    int workers) {
  std::vector<CounterfactualResult> results(instances.size());
  ParallelFor(instances.size(), workers, [&](size_t i) {
    RpConfig instance_config = config;
    instance_config.seed = config.seed + i;
    results[i] = RpGenerate(ensemble, instance_config, instances[i], distance);
  });
  return results;
}

}  // namespace treecf
