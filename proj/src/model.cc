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

#include "treecf/model.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "treecf/errors.h"

namespace treecf {
namespace {

constexpr double kNormalizationTolerance = 1e-9;

std::string NodeLabel(int node_id) {
  return "node " + std::to_string(node_id);
}

void ValidateNode(const TreeNode& node, int n_classes) {
  if (node.is_leaf()) {
    if (node.left != -1 || node.right != -1) {
      throw StructuralError(NodeLabel(node.id) + ": leaf has children");
    }
    if (static_cast<int>(node.distribution.size()) != n_classes) {
      throw StructuralError(NodeLabel(node.id) +
                            ": leaf distribution has " +
                            std::to_string(node.distribution.size()) +
                            " entries, expected " + std::to_string(n_classes));
    }
    double sum = 0.0;
    for (double p : node.distribution) {
      if (!std::isfinite(p) || p < 0.0) {
        throw StructuralError(NodeLabel(node.id) +
                              ": leaf distribution has a negative or "
                              "non-finite entry");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kNormalizationTolerance) {
      throw StructuralError(NodeLabel(node.id) + ": leaf not normalized");
    }
    return;
  }
  if (node.feature < 0) {
    throw StructuralError(NodeLabel(node.id) + ": negative feature index");
  }
  if (!std::isfinite(node.threshold)) {
    throw StructuralError(NodeLabel(node.id) + ": non-finite threshold");
  }
  if (node.left == node.right) {
    throw StructuralError(NodeLabel(node.id) +
                          ": internal node needs two distinct children");
  }
  if (!node.distribution.empty()) {
    throw StructuralError(NodeLabel(node.id) +
                          ": internal node carries a distribution");
  }
}

}  // namespace

DecisionTree::DecisionTree(std::vector<TreeNode> nodes, int root_id,
                           int n_classes)
    : root_id_(root_id), n_classes_(n_classes) {
  if (n_classes < 1) {
    throw StructuralError("tree must have at least one class");
  }
  if (nodes.empty()) {
    throw StructuralError("tree has no nodes");
  }
  std::unordered_map<int, int> input_index;
  for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
    if (!input_index.emplace(nodes[i].id, i).second) {
      throw StructuralError(NodeLabel(nodes[i].id) + ": duplicate node id");
    }
    ValidateNode(nodes[i], n_classes);
  }
  if (!input_index.contains(root_id)) {
    throw StructuralError("root " + NodeLabel(root_id) + " does not exist");
  }

  // Pre-order traversal; detects dangling children, shared children and
  // cycles (any node visited twice).
  std::vector<char> visited(nodes.size(), 0);
  std::vector<std::pair<int, int>> stack = {{root_id, -1}};  // (id, parent)
  std::vector<char> left_flags;
  while (!stack.empty()) {
    const auto [id, parent_pos] = stack.back();
    stack.pop_back();
    const auto it = input_index.find(id);
    if (it == input_index.end()) {
      throw StructuralError(NodeLabel(nodes_[parent_pos].id) +
                            ": child " + NodeLabel(id) + " does not exist");
    }
    if (visited[it->second]) {
      throw StructuralError(NodeLabel(id) +
                            ": reached twice (cycle or shared child)");
    }
    visited[it->second] = 1;
    TreeNode node = std::move(nodes[it->second]);
    const int pos = static_cast<int>(nodes_.size());
    if (parent_pos >= 0) {
      node.parent = nodes_[parent_pos].id;
      is_left_child_.push_back(nodes_[parent_pos].left == id ? 1 : 0);
    } else {
      node.parent = std::nullopt;
      is_left_child_.push_back(0);
    }
    parent_index_.push_back(parent_pos);
    index_of_.emplace(node.id, pos);
    if (!node.is_leaf()) {
      // Right pushed first so the left subtree is emitted first.
      stack.emplace_back(node.right, pos);
      stack.emplace_back(node.left, pos);
    }
    nodes_.push_back(std::move(node));
  }
  if (nodes_.size() != nodes.size()) {
    for (size_t i = 0; i < nodes.size(); ++i) {
      if (!visited[i]) {
        throw StructuralError(NodeLabel(nodes[i].id) +
                              ": unreachable from the root");
      }
    }
  }
  left_index_.assign(nodes_.size(), -1);
  right_index_.assign(nodes_.size(), -1);
  for (int i = 0; i < size(); ++i) {
    if (!nodes_[i].is_leaf()) {
      left_index_[i] = index_of_.at(nodes_[i].left);
      right_index_[i] = index_of_.at(nodes_[i].right);
    }
  }
}

bool DecisionTree::Contains(int node_id) const {
  return index_of_.contains(node_id);
}

int DecisionTree::IndexOf(int node_id) const {
  const auto it = index_of_.find(node_id);
  if (it == index_of_.end()) {
    throw StructuralError("unknown " + NodeLabel(node_id));
  }
  return it->second;
}

std::vector<int> DecisionTree::LeafIds() const {
  std::vector<int> ids;
  for (const TreeNode& node : nodes_) {
    if (node.is_leaf()) ids.push_back(node.id);
  }
  return ids;
}

std::vector<int> DecisionTree::PathTo(int node_id) const {
  std::vector<int> path;
  for (int index = IndexOf(node_id); index >= 0;
       index = parent_index_[index]) {
    path.push_back(nodes_[index].id);
  }
  return {path.rbegin(), path.rend()};
}

int DecisionTree::ActiveLeafIndex(std::span<const double> x) const {
  int index = 0;
  while (!nodes_[index].is_leaf()) {
    const TreeNode& node = nodes_[index];
    index = x[node.feature] > node.threshold ? left_index_[index]
                                             : right_index_[index];
  }
  return index;
}

int DecisionTree::MaxFeatureIndex() const {
  int max_feature = -1;
  for (const TreeNode& node : nodes_) {
    if (!node.is_leaf()) max_feature = std::max(max_feature, node.feature);
  }
  return max_feature;
}

std::string_view ModelKindName(ModelKind kind) {
  switch (kind) {
    case ModelKind::kDecisionTree:
      return "decision_tree";
    case ModelKind::kRandomForest:
      return "random_forest";
    case ModelKind::kAdaBoost:
      return "adaboost";
  }
  return "unknown";
}

ModelKind ParseModelKind(std::string_view name) {
  if (name == "decision_tree") return ModelKind::kDecisionTree;
  if (name == "random_forest") return ModelKind::kRandomForest;
  if (name == "adaboost") return ModelKind::kAdaBoost;
  throw ArgumentError("unknown model_kind '" + std::string(name) + "'");
}

TreeEnsemble::TreeEnsemble(ModelKind kind, int n_classes,
                           std::vector<std::string> feature_names,
                           std::vector<DecisionTree> trees,
                           std::vector<double> weights)
    : kind_(kind),
      n_classes_(n_classes),
      n_features_(0),
      feature_names_(std::move(feature_names)),
      trees_(std::move(trees)),
      weights_(std::move(weights)) {
  if (n_classes_ < 1) {
    throw StructuralError("ensemble must have at least one class");
  }
  if (trees_.empty()) {
    throw StructuralError("ensemble has no trees");
  }
  if (trees_.size() != weights_.size()) {
    throw StructuralError("ensemble has " + std::to_string(trees_.size()) +
                          " trees but " + std::to_string(weights_.size()) +
                          " weights");
  }
  for (double w : weights_) {
    if (!std::isfinite(w)) {
      throw StructuralError("ensemble has a non-finite tree weight");
    }
  }
  if (kind_ == ModelKind::kDecisionTree &&
      (trees_.size() != 1 || weights_[0] != 1.0)) {
    throw StructuralError(
        "a decision_tree model must hold exactly one tree with weight 1");
  }
  int max_feature = -1;
  for (size_t m = 0; m < trees_.size(); ++m) {
    if (trees_[m].n_classes() != n_classes_) {
      throw StructuralError("tree " + std::to_string(m) + " has " +
                            std::to_string(trees_[m].n_classes()) +
                            " classes, ensemble has " +
                            std::to_string(n_classes_));
    }
    max_feature = std::max(max_feature, trees_[m].MaxFeatureIndex());
  }
  if (feature_names_.empty()) {
    n_features_ = max_feature + 1;
  } else {
    n_features_ = static_cast<int>(feature_names_.size());
    if (max_feature >= n_features_) {
      throw StructuralError("split on feature " + std::to_string(max_feature) +
                            " but only " + std::to_string(n_features_) +
                            " feature names");
    }
  }
}

int ArgMax(std::span<const double> values) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(values.size()); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

void CheckFinite(std::span<const double> x) {
  for (size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) {
      throw ArgumentError("instance feature " + std::to_string(i) +
                          " is not finite");
    }
  }
}

namespace {

void CheckWidth(int needed, std::span<const double> x) {
  if (static_cast<int>(x.size()) < needed) {
    throw ArgumentError("instance has " + std::to_string(x.size()) +
                        " features, model needs " + std::to_string(needed));
  }
}

}  // namespace

int NodeActivation(const DecisionTree& tree, int node_id,
                   std::span<const double> x) {
  CheckWidth(tree.MaxFeatureIndex() + 1, x);
  for (int index = tree.IndexOf(node_id); index > 0;) {
    const int parent = tree.parent_index(index);
    const TreeNode& split = tree.at(parent);
    const bool goes_left = x[split.feature] > split.threshold;
    if (goes_left != tree.is_left_child(index)) return 0;
    index = parent;
  }
  return 1;
}

std::vector<double> TreePredictDistribution(const DecisionTree& tree,
                                            std::span<const double> x) {
  CheckWidth(tree.MaxFeatureIndex() + 1, x);
  return tree.at(tree.ActiveLeafIndex(x)).distribution;
}

std::vector<double> EnsembleScores(const TreeEnsemble& ensemble,
                                   std::span<const double> x) {
  CheckWidth(ensemble.n_features(), x);
  std::vector<double> scores(ensemble.n_classes(), 0.0);
  const auto& trees = ensemble.trees();
  for (size_t m = 0; m < trees.size(); ++m) {
    const auto& leaf = trees[m].at(trees[m].ActiveLeafIndex(x)).distribution;
    const double w = ensemble.weights()[m];
    for (int c = 0; c < ensemble.n_classes(); ++c) scores[c] += w * leaf[c];
  }
  return scores;
}

HardPrediction EnsemblePredict(const TreeEnsemble& ensemble,
                               std::span<const double> x) {
  HardPrediction prediction;
  prediction.label = PredictLabel(ensemble, x);
  prediction.indicator.assign(ensemble.n_classes(), 0.0);
  prediction.indicator[prediction.label] = 1.0;
  return prediction;
}

int PredictLabel(const TreeEnsemble& ensemble, std::span<const double> x) {
  return ArgMax(EnsembleScores(ensemble, x));
}

}  // namespace treecf
