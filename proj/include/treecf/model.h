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

#ifndef TREECF_MODEL_H_
#define TREECF_MODEL_H_

// Hard (deterministic) tree-ensemble classifiers.
//
// Split convention: an internal node j sends an instance to its LEFT child
// when x[feature_j] > threshold_j and to its RIGHT child otherwise. Sources
// that send "<=" to the left must swap children when exporting.

#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace treecf {

enum class NodeKind { kInternal, kLeaf };

struct TreeNode {
  int id = 0;
  NodeKind kind = NodeKind::kLeaf;
  // Internal nodes only.
  int feature = -1;
  double threshold = 0.0;
  int left = -1;   // Active when x[feature] > threshold.
  int right = -1;  // Active when x[feature] <= threshold.
  // Leaf nodes only: class distribution T(y|leaf), normalized.
  std::vector<double> distribution;
  // Filled in by DecisionTree; nullopt for the root.
  std::optional<int> parent;

  bool is_leaf() const { return kind == NodeKind::kLeaf; }
  bool operator==(const TreeNode&) const = default;
};

// A single binary decision tree. Immutable after construction.
//
// Nodes are stored in pre-order (every parent precedes its children), so a
// single forward sweep over `nodes()` visits ancestors first. Hot loops use
// the index-based accessors; the public API is keyed by node id.
class DecisionTree {
 public:
  // Validates the structure and throws StructuralError naming the offending
  // node on any violation.
  DecisionTree(std::vector<TreeNode> nodes, int root_id, int n_classes);

  int root_id() const { return root_id_; }
  int n_classes() const { return n_classes_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<TreeNode>& nodes() const { return nodes_; }

  bool Contains(int node_id) const;
  // Throws StructuralError for unknown ids.
  int IndexOf(int node_id) const;
  const TreeNode& node(int node_id) const { return nodes_[IndexOf(node_id)]; }

  const TreeNode& at(int index) const { return nodes_[index]; }
  int parent_index(int index) const { return parent_index_[index]; }
  int left_index(int index) const { return left_index_[index]; }
  int right_index(int index) const { return right_index_[index]; }
  bool is_left_child(int index) const { return is_left_child_[index] != 0; }

  std::vector<int> LeafIds() const;
  // Node ids from the root down to `node_id`, inclusive.
  std::vector<int> PathTo(int node_id) const;
  // Index (not id) of the leaf reached by `x`.
  int ActiveLeafIndex(std::span<const double> x) const;
  // Largest feature index used by a split, -1 for a single leaf.
  int MaxFeatureIndex() const;

  bool operator==(const DecisionTree& other) const {
    return root_id_ == other.root_id_ && n_classes_ == other.n_classes_ &&
           nodes_ == other.nodes_;
  }

 private:
  std::vector<TreeNode> nodes_;
  int root_id_;
  int n_classes_;
  std::unordered_map<int, int> index_of_;
  std::vector<int> parent_index_;
  std::vector<int> left_index_;
  std::vector<int> right_index_;
  std::vector<char> is_left_child_;
};

enum class ModelKind { kDecisionTree, kRandomForest, kAdaBoost };

std::string_view ModelKindName(ModelKind kind);
// Throws ArgumentError for unknown names.
ModelKind ParseModelKind(std::string_view name);

// Weighted ensemble of decision trees: y = argmax_y sum_m w_m T_m(y|x).
class TreeEnsemble {
 public:
  TreeEnsemble(ModelKind kind, int n_classes,
               std::vector<std::string> feature_names,
               std::vector<DecisionTree> trees, std::vector<double> weights);

  ModelKind kind() const { return kind_; }
  int n_classes() const { return n_classes_; }
  // Number of input features. Taken from the feature names when present,
  // otherwise from the largest split feature.
  int n_features() const { return n_features_; }
  const std::vector<std::string>& feature_names() const {
    return feature_names_;
  }
  const std::vector<DecisionTree>& trees() const { return trees_; }
  const std::vector<double>& weights() const { return weights_; }

  bool operator==(const TreeEnsemble&) const = default;

 private:
  ModelKind kind_;
  int n_classes_;
  int n_features_;
  std::vector<std::string> feature_names_;
  std::vector<DecisionTree> trees_;
  std::vector<double> weights_;
};

// Index of the largest entry; ties go to the lowest index.
int ArgMax(std::span<const double> values);

// Throws ArgumentError if `x` holds NaN or infinite entries.
void CheckFinite(std::span<const double> x);

// t_j(x): 1 iff every split on the path to `node_id` routes x towards it.
int NodeActivation(const DecisionTree& tree, int node_id,
                   std::span<const double> x);

// T(y|x): the distribution of the unique active leaf.
std::vector<double> TreePredictDistribution(const DecisionTree& tree,
                                            std::span<const double> x);

// Weighted class scores sum_m w_m T_m(y|x).
std::vector<double> EnsembleScores(const TreeEnsemble& ensemble,
                                   std::span<const double> x);

struct HardPrediction {
  int label = 0;
  std::vector<double> indicator;  // One-hot at `label`.
};

HardPrediction EnsemblePredict(const TreeEnsemble& ensemble,
                               std::span<const double> x);

// Same label as EnsemblePredict without building the indicator.
int PredictLabel(const TreeEnsemble& ensemble, std::span<const double> x);

}  // namespace treecf

#endif  // TREECF_MODEL_H_
