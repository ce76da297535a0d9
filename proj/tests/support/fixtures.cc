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

#include "support/fixtures.h"

#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include <unistd.h>

namespace treecf::testing {

TreeNode Leaf(int id, std::vector<double> distribution) {
  TreeNode node;
  node.id = id;
  node.kind = NodeKind::kLeaf;
  node.distribution = std::move(distribution);
  return node;
}

TreeNode Split(int id, int feature, double threshold, int left, int right) {
  TreeNode node;
  node.id = id;
  node.kind = NodeKind::kInternal;
  node.feature = feature;
  node.threshold = threshold;
  node.left = left;
  node.right = right;
  return node;
}

TreeEnsemble Stump(double threshold, int feature, int n_features) {
  DecisionTree tree({Split(0, feature, threshold, 1, 2), Leaf(1, {0, 1}),
                     Leaf(2, {1, 0})},
                    0, 2);
  std::vector<std::string> names;
  for (int f = 0; f < n_features; ++f) names.push_back("x" + std::to_string(f));
  return TreeEnsemble(ModelKind::kDecisionTree, 2, names, {tree}, {1.0});
}

TreeEnsemble ThreeTreeFixture() {
  DecisionTree t1({Split(0, 0, 0.6, 1, 2), Leaf(1, {0, 1}), Leaf(2, {1, 0})},
                  0, 2);
  DecisionTree t2({Split(0, 1, 0.6, 1, 2), Leaf(1, {0, 1}), Leaf(2, {1, 0})},
                  0, 2);
  DecisionTree t3({Split(0, 0, 0.3, 1, 2), Split(1, 1, 0.3, 3, 4),
                   Leaf(2, {1, 0}), Leaf(3, {0, 1}), Leaf(4, {1, 0})},
                  0, 2);
  return TreeEnsemble(ModelKind::kRandomForest, 2, {"x0", "x1"},
                      {t1, t2, t3}, {1.0, 1.0, 1.0});
}

DecisionTree RandomTree(std::mt19937_64& rng, const RandomTreeSpec& spec) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> feature(0, spec.n_features - 1);
  std::vector<TreeNode> nodes;
  std::function<int(int)> build = [&](int depth) -> int {
    const int id = static_cast<int>(nodes.size());
    nodes.emplace_back();
    const bool leaf = depth >= spec.max_depth ||
                      (depth > 0 && unit(rng) < spec.leaf_probability);
    if (leaf) {
      std::vector<double> dist(spec.n_classes);
      double sum = 0.0;
      for (double& p : dist) {
        p = -std::log(1.0 - unit(rng));
        sum += p;
      }
      for (double& p : dist) p /= sum;
      nodes[id] = Leaf(id, dist);
      return id;
    }
    const int f = feature(rng);
    const double threshold = 0.05 + 0.9 * unit(rng);
    const int left = build(depth + 1);
    const int right = build(depth + 1);
    nodes[id] = Split(id, f, threshold, left, right);
    return id;
  };
  build(0);
  return DecisionTree(std::move(nodes), 0, spec.n_classes);
}

TreeEnsemble RandomEnsemble(std::mt19937_64& rng, const RandomTreeSpec& spec,
                            int n_trees) {
  std::uniform_real_distribution<double> weight(0.2, 2.0);
  std::vector<DecisionTree> trees;
  std::vector<double> weights;
  for (int m = 0; m < n_trees; ++m) {
    trees.push_back(RandomTree(rng, spec));
    weights.push_back(n_trees == 1 ? 1.0 : weight(rng));
  }
  std::vector<std::string> names;
  for (int f = 0; f < spec.n_features; ++f) {
    names.push_back("f" + std::to_string(f));
  }
  return TreeEnsemble(
      n_trees == 1 ? ModelKind::kDecisionTree : ModelKind::kRandomForest,
      spec.n_classes, names, std::move(trees), std::move(weights));
}

std::vector<double> RandomPoint(std::mt19937_64& rng, int n_features) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> x(n_features);
  for (double& v : x) v = unit(rng);
  return x;
}

bool OffThreshold(const TreeEnsemble& ensemble, std::span<const double> x,
                  double margin) {
  for (const auto& tree : ensemble.trees()) {
    for (const auto& node : tree.nodes()) {
      if (!node.is_leaf() &&
          std::abs(x[node.feature] - node.threshold) < margin) {
        return false;
      }
    }
  }
  return true;
}

std::string SyntheticCsv(int n_features, int n_rows, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  // Mixing matrix with a dominant diagonal gives moderately correlated
  // features.
  std::vector<std::vector<double>> mix(n_features,
                                       std::vector<double>(n_features));
  for (int i = 0; i < n_features; ++i) {
    for (int j = 0; j < n_features; ++j) {
      mix[i][j] = (i == j ? 1.0 : 0.3 * normal(rng));
    }
  }
  std::vector<double> w(n_features);
  for (double& v : w) v = normal(rng);
  std::ostringstream csv;
  csv.precision(10);
  for (int f = 0; f < n_features; ++f) csv << "f" << f << ",";
  csv << "group,label\n";
  const char* groups[] = {"a", "b", "c"};
  for (int n = 0; n < n_rows; ++n) {
    std::vector<double> z(n_features), x(n_features, 0.0);
    for (double& v : z) v = normal(rng);
    for (int i = 0; i < n_features; ++i) {
      for (int j = 0; j < n_features; ++j) x[i] += mix[i][j] * z[j];
    }
    double score = 0.0;
    for (int i = 0; i < n_features; ++i) score += w[i] * x[i];
    score += 0.8 * x[0] * x[1 % n_features] + std::sin(2.0 * x.back());
    score += 0.3 * normal(rng);
    for (int f = 0; f < n_features; ++f) csv << x[f] << ",";
    csv << groups[n % 3] << "," << (score > 0.0 ? 1 : 0) << "\n";
  }
  return csv.str();
}

std::filesystem::path WriteSyntheticDataset(const std::filesystem::path& dir,
                                            const std::string& name,
                                            int n_features, int n_rows,
                                            std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream csv(dir / (name + ".csv"));
    csv << SyntheticCsv(n_features, n_rows, seed);
  }
  const auto schema_path = dir / (name + ".schema.json");
  std::ofstream schema(schema_path);
  schema << "{\"name\": \"" << name << "\", \"label_column\": \"label\", "
         << "\"label_transform\": null, \"categorical_columns\": [\"group\"], "
         << "\"csv_path\": \"" << name << ".csv\"}\n";
  return schema_path;
}

std::filesystem::path TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  auto dir = std::filesystem::temp_directory_path() /
             ("treecf_" + tag + "_" + std::to_string(::getpid()) + "_" +
              std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace treecf::testing
