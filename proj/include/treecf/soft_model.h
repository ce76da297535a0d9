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

#ifndef TREECF_SOFT_MODEL_H_
#define TREECF_SOFT_MODEL_H_

// Differentiable relaxation of a hard tree ensemble.
//
// Split indicators are replaced by sig(z) = 1 / (1 + exp(sigma * z)), a
// decreasing sigmoid, applied to (threshold - x) for left children and to
// (x - threshold) for right children. Tree outputs are combined with the
// ensemble weights and passed through a softmax with temperature tau.
// Both limits sigma, tau -> infinity recover the hard model.

#include <span>
#include <vector>

#include "treecf/model.h"

namespace treecf {

struct SoftEnsembleParams {
  double sigma = 10.0;  // Sigmoid steepness.
  double tau = 1.0;     // Softmax temperature (multiplies the scores).

  // Throws ArgumentError unless both are finite and positive.
  void Validate() const;
  bool operator==(const SoftEnsembleParams&) const = default;
};

// sigma * z is clamped to [-kSigmoidExponentClamp, kSigmoidExponentClamp];
// outside that band the sigmoid is exactly 0 or 1 with zero slope.
inline constexpr double kSigmoidExponentClamp = 500.0;

// sig(z) = 1 / (1 + exp(sigma * z)).
double Sigmoid(double z, double sigma);

struct SoftPrediction {
  std::vector<double> probabilities;  // M~(y|x), one per class.
  // d M~(y|x) / d x, row-major n_classes x n_features. Empty unless
  // requested.
  std::vector<double> gradient;
};

// t~_j(x) for a single node.
double SoftNodeActivation(const DecisionTree& tree, int node_id,
                          std::span<const double> x, double sigma);

// t~ for every node, indexed like tree.at(index).
std::vector<double> SoftNodeActivations(const DecisionTree& tree,
                                        std::span<const double> x,
                                        double sigma);

// T~(y|x) = sum over leaves of t~_leaf(x) T(y|leaf).
std::vector<double> SoftTreeDistribution(const DecisionTree& tree,
                                         std::span<const double> x,
                                         double sigma);

SoftPrediction SoftEnsemblePredict(const TreeEnsemble& ensemble,
                                   std::span<const double> x,
                                   const SoftEnsembleParams& params,
                                   bool with_gradient = false);

// d M~(y|x) / d x for one class, length n_features.
std::vector<double> SoftEnsembleGradient(const TreeEnsemble& ensemble,
                                         std::span<const double> x,
                                         const SoftEnsembleParams& params,
                                         int y);

// Fraction of instances where argmax M~ equals the hard label. Throws
// ArgumentError for an empty set.
double Fidelity(const TreeEnsemble& ensemble, const SoftEnsembleParams& params,
                std::span<const std::vector<double>> instances);

// Reusable evaluator for the optimizer's inner loop. Holds scratch buffers,
// so one instance per thread.
//
// Activations are computed in one pre-order sweep per tree; gradients by a
// reverse sweep that accumulates adjoints from the leaves to the root, so a
// query costs O(nodes * classes).
class SoftEnsembleEvaluator {
 public:
  SoftEnsembleEvaluator(const TreeEnsemble& ensemble,
                        const SoftEnsembleParams& params);

  // Fills `probabilities` (size n_classes) with M~(.|x).
  void Probabilities(std::span<const double> x,
                     std::span<double> probabilities);

  // Returns M~(y|x) and adds scale * dM~(y|x)/dx to `gradient`.
  double AccumulateClassGradient(std::span<const double> x, int y,
                                 double scale, std::span<double> gradient);

  const TreeEnsemble& ensemble() const { return ensemble_; }
  const SoftEnsembleParams& params() const { return params_; }

 private:
  void Forward(std::span<const double> x);

  const TreeEnsemble& ensemble_;
  SoftEnsembleParams params_;
  // Per tree, per node: activation, sigmoid factor, and d factor / d x_f.
  std::vector<std::vector<double>> activation_;
  std::vector<std::vector<double>> factor_;
  std::vector<std::vector<double>> factor_slope_;
  std::vector<double> adjoint_;
  std::vector<double> scores_;
  std::vector<double> probabilities_;
};

}  // namespace treecf

#endif  // TREECF_SOFT_MODEL_H_
