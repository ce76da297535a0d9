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

#include "treecf/soft_model.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "treecf/errors.h"

namespace treecf {
namespace {

// d sig(z) / dz, consistent with the clamp in Sigmoid().
double SigmoidSlope(double z, double sigma) {
  const double exponent = sigma * z;
  if (exponent >= kSigmoidExponentClamp ||
      exponent <= -kSigmoidExponentClamp) {
    return 0.0;
  }
  const double s = 1.0 / (1.0 + std::exp(exponent));
  return -sigma * s * (1.0 - s);
}

void CheckWidth(int needed, std::span<const double> x) {
  if (static_cast<int>(x.size()) < needed) {
    throw ArgumentError("instance has " + std::to_string(x.size()) +
                        " features, model needs " + std::to_string(needed));
  }
}

}  // namespace

void SoftEnsembleParams::Validate() const {
  if (!(std::isfinite(sigma) && sigma > 0.0)) {
    throw ArgumentError("sigma must be finite and positive");
  }
  if (!(std::isfinite(tau) && tau > 0.0)) {
    throw ArgumentError("tau must be finite and positive");
  }
}

double Sigmoid(double z, double sigma) {
  const double exponent = sigma * z;
  if (exponent >= kSigmoidExponentClamp) return 0.0;
  if (exponent <= -kSigmoidExponentClamp) return 1.0;
  return 1.0 / (1.0 + std::exp(exponent));
}

std::vector<double> SoftNodeActivations(const DecisionTree& tree,
                                        std::span<const double> x,
                                        double sigma) {
  if (!(sigma > 0.0)) throw ArgumentError("sigma must be positive");
  CheckWidth(tree.MaxFeatureIndex() + 1, x);
  std::vector<double> activation(tree.size());
  activation[0] = 1.0;
  for (int i = 1; i < tree.size(); ++i) {
    const int parent = tree.parent_index(i);
    const TreeNode& split = tree.at(parent);
    const double gap = x[split.feature] - split.threshold;
    activation[i] =
        activation[parent] * Sigmoid(tree.is_left_child(i) ? -gap : gap, sigma);
  }
  return activation;
}

double SoftNodeActivation(const DecisionTree& tree, int node_id,
                          std::span<const double> x, double sigma) {
  const int index = tree.IndexOf(node_id);
  return SoftNodeActivations(tree, x, sigma)[index];
}

std::vector<double> SoftTreeDistribution(const DecisionTree& tree,
                                         std::span<const double> x,
                                         double sigma) {
  const std::vector<double> activation = SoftNodeActivations(tree, x, sigma);
  std::vector<double> distribution(tree.n_classes(), 0.0);
  for (int i = 0; i < tree.size(); ++i) {
    const TreeNode& node = tree.at(i);
    if (!node.is_leaf()) continue;
    for (int c = 0; c < tree.n_classes(); ++c) {
      distribution[c] += activation[i] * node.distribution[c];
    }
  }
  return distribution;
}

SoftEnsembleEvaluator::SoftEnsembleEvaluator(const TreeEnsemble& ensemble,
                                             const SoftEnsembleParams& params)
    : ensemble_(ensemble), params_(params) {
  params_.Validate();
  for (const DecisionTree& tree : ensemble_.trees()) {
    activation_.emplace_back(tree.size());
    factor_.emplace_back(tree.size());
    factor_slope_.emplace_back(tree.size());
  }
  scores_.resize(ensemble_.n_classes());
  probabilities_.resize(ensemble_.n_classes());
}

void SoftEnsembleEvaluator::Forward(std::span<const double> x) {
  CheckWidth(ensemble_.n_features(), x);
  const double sigma = params_.sigma;
  const int n_classes = ensemble_.n_classes();
  std::fill(scores_.begin(), scores_.end(), 0.0);
  const auto& trees = ensemble_.trees();
  for (size_t m = 0; m < trees.size(); ++m) {
    const DecisionTree& tree = trees[m];
    std::vector<double>& activation = activation_[m];
    std::vector<double>& factor = factor_[m];
    std::vector<double>& slope = factor_slope_[m];
    const double weight = ensemble_.weights()[m];
    activation[0] = 1.0;
    factor[0] = 1.0;
    slope[0] = 0.0;
    for (int i = 0; i < tree.size(); ++i) {
      const TreeNode& node = tree.at(i);
      if (i > 0) {
        const int parent = tree.parent_index(i);
        const TreeNode& split = tree.at(parent);
        const double gap = x[split.feature] - split.threshold;
        // Left child: sig(threshold - x), dz/dx = -1. Right: sig(x - th).
        if (tree.is_left_child(i)) {
          factor[i] = Sigmoid(-gap, sigma);
          slope[i] = -SigmoidSlope(-gap, sigma);
        } else {
          factor[i] = Sigmoid(gap, sigma);
          slope[i] = SigmoidSlope(gap, sigma);
        }
        activation[i] = activation[parent] * factor[i];
      }
      if (node.is_leaf() && activation[i] != 0.0) {
        const double a = weight * activation[i];
        for (int c = 0; c < n_classes; ++c) {
          scores_[c] += a * node.distribution[c];
        }
      }
    }
  }
  // Softmax with temperature, shifted by the max for stability.
  const double max_score = *std::max_element(scores_.begin(), scores_.end());
  double total = 0.0;
  for (int c = 0; c < n_classes; ++c) {
    probabilities_[c] = std::exp(params_.tau * (scores_[c] - max_score));
    total += probabilities_[c];
  }
  for (double& p : probabilities_) p /= total;
}

void SoftEnsembleEvaluator::Probabilities(std::span<const double> x,
                                          std::span<double> probabilities) {
  Forward(x);
  std::copy(probabilities_.begin(), probabilities_.end(),
            probabilities.begin());
}

double SoftEnsembleEvaluator::AccumulateClassGradient(
    std::span<const double> x, int y, double scale,
    std::span<double> gradient) {
  if (y < 0 || y >= ensemble_.n_classes()) {
    throw ArgumentError("class index " + std::to_string(y) + " out of range");
  }
  Forward(x);
  const int n_classes = ensemble_.n_classes();
  const double p_y = probabilities_[y];
  // d p_y / d score_c = tau * p_y * (1[c == y] - p_c).
  std::vector<double>& d_score = scores_;
  for (int c = 0; c < n_classes; ++c) {
    d_score[c] = params_.tau * p_y * ((c == y ? 1.0 : 0.0) - probabilities_[c]);
  }
  const auto& trees = ensemble_.trees();
  for (size_t m = 0; m < trees.size(); ++m) {
    const DecisionTree& tree = trees[m];
    const std::vector<double>& activation = activation_[m];
    const std::vector<double>& factor = factor_[m];
    const std::vector<double>& slope = factor_slope_[m];
    const double weight = ensemble_.weights()[m];
    adjoint_.assign(tree.size(), 0.0);
    for (int i = 0; i < tree.size(); ++i) {
      const TreeNode& node = tree.at(i);
      if (!node.is_leaf()) continue;
      double a = 0.0;
      for (int c = 0; c < n_classes; ++c) a += d_score[c] * node.distribution[c];
      adjoint_[i] = weight * a;
    }
    for (int i = tree.size() - 1; i > 0; --i) {
      const double adj = adjoint_[i];
      if (adj == 0.0) continue;
      const int parent = tree.parent_index(i);
      gradient[tree.at(parent).feature] +=
          scale * adj * activation[parent] * slope[i];
      adjoint_[parent] += adj * factor[i];
    }
  }
  return p_y;
}

SoftPrediction SoftEnsemblePredict(const TreeEnsemble& ensemble,
                                   std::span<const double> x,
                                   const SoftEnsembleParams& params,
                                   bool with_gradient) {
  SoftEnsembleEvaluator evaluator(ensemble, params);
  SoftPrediction prediction;
  prediction.probabilities.resize(ensemble.n_classes());
  evaluator.Probabilities(x, prediction.probabilities);
  if (with_gradient) {
    const int n_features = ensemble.n_features();
    prediction.gradient.assign(
        static_cast<size_t>(ensemble.n_classes()) * n_features, 0.0);
    for (int c = 0; c < ensemble.n_classes(); ++c) {
      evaluator.AccumulateClassGradient(
          x, c, 1.0,
          std::span<double>(prediction.gradient)
              .subspan(static_cast<size_t>(c) * n_features, n_features));
    }
  }
  return prediction;
}

std::vector<double> SoftEnsembleGradient(const TreeEnsemble& ensemble,
                                         std::span<const double> x,
                                         const SoftEnsembleParams& params,
                                         int y) {
  SoftEnsembleEvaluator evaluator(ensemble, params);
  std::vector<double> gradient(ensemble.n_features(), 0.0);
  evaluator.AccumulateClassGradient(x, y, 1.0, gradient);
  return gradient;
}

double Fidelity(const TreeEnsemble& ensemble, const SoftEnsembleParams& params,
                std::span<const std::vector<double>> instances) {
  if (instances.empty()) {
    throw ArgumentError("fidelity needs at least one instance");
  }
  SoftEnsembleEvaluator evaluator(ensemble, params);
  std::vector<double> probabilities(ensemble.n_classes());
  size_t agree = 0;
  for (const auto& x : instances) {
    evaluator.Probabilities(x, probabilities);
    if (ArgMax(probabilities) == PredictLabel(ensemble, x)) ++agree;
  }
  return static_cast<double>(agree) / static_cast<double>(instances.size());
}

}  // namespace treecf
