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

#ifndef TREECF_BASELINES_H_
#define TREECF_BASELINES_H_

// Baseline generators with the same result contract as the gradient search.
//
// Feature tweaking (FT) pushes an instance into each leaf whose majority
// class differs from the instance's label, one tree at a time, and keeps the
// closest candidate that flips the whole ensemble. Random perturbation (RP)
// adds Gaussian noise and keeps the closest flipping sample.

#include <cstdint>
#include <span>
#include <vector>

#include "treecf/counterfactual.h"
#include "treecf/distance.h"
#include "treecf/model.h"

namespace treecf {

struct FtConfig {
  double epsilon = 0.01;

  // {0.001, 0.005, 0.01, 0.1}.
  static std::vector<double> DefaultEpsilonGrid();
  void Validate() const;
};

struct RpConfig {
  int samples = 1000;
  double noise_std = 0.5;  // Standard deviation, per coordinate.
  std::uint64_t seed = 0;

  void Validate() const;
};

// Leaf ids whose argmax label differs from y_x.
std::vector<int> FtChangingLeaves(const DecisionTree& tree, int y_x);

// Copies x and, walking root to leaf, moves every feature whose path
// condition does not already hold with an epsilon margin to threshold +
// epsilon (left, ">") or threshold - epsilon (right, "<="). Later conditions
// on the same feature override earlier ones. Throws StructuralError if the
// result does not activate the leaf.
std::vector<double> FtPerturbToLeaf(const DecisionTree& tree, int leaf_id,
                                    std::span<const double> x, double epsilon);

CounterfactualResult FtGenerate(const TreeEnsemble& ensemble,
                                const FtConfig& config,
                                std::span<const double> x,
                                const Distance& distance);

std::vector<CounterfactualResult> FtGenerateAll(
    const TreeEnsemble& ensemble, const FtConfig& config,
    std::span<const std::vector<double>> instances, const Distance& distance,
    int workers = 0);

struct FtSelection {
  double epsilon = 0.0;
  std::vector<CounterfactualResult> results;
};

// Picks the epsilon with the most valid results, ties broken by the smaller
// mean distance over valid results, then by grid order.
FtSelection FtSelectEpsilon(const TreeEnsemble& ensemble,
                            std::span<const double> epsilons,
                            std::span<const std::vector<double>> instances,
                            const Distance& distance, int workers = 0);

CounterfactualResult RpGenerate(const TreeEnsemble& ensemble,
                                const RpConfig& config,
                                std::span<const double> x,
                                const Distance& distance);

// Instance i is drawn with seed config.seed + i, so results do not depend on
// the worker count.
std::vector<CounterfactualResult> RpGenerateAll(
    const TreeEnsemble& ensemble, const RpConfig& config,
    std::span<const std::vector<double>> instances, const Distance& distance,
    int workers = 0);

}  // namespace treecf

#endif  // TREECF_BASELINES_H_
