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

#ifndef TREECF_TESTS_SUPPORT_FIXTURES_H_
#define TREECF_TESTS_SUPPORT_FIXTURES_H_

// Hand-built and randomly generated models and datasets shared by the tests.

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "treecf/dataio.h"
#include "treecf/model.h"

namespace treecf::testing {

// Leaf with a one-hot (or given) distribution.
TreeNode Leaf(int id, std::vector<double> distribution);
TreeNode Split(int id, int feature, double threshold, int left, int right);

// Depth-1 binary tree: class 1 when x[feature] > threshold.
TreeEnsemble Stump(double threshold, int feature = 0, int n_features = 1);

// Three unit-weight trees over two features, one-hot leaves:
//   T1 votes 1 iff x0 > 0.6,
//   T2 votes 1 iff x1 > 0.6,
//   T3 votes 1 iff x0 > 0.3 and x1 > 0.3.
// The forest predicts 1 when at least two trees vote 1.
TreeEnsemble ThreeTreeFixture();

struct RandomTreeSpec {
  int n_features = 3;
  int n_classes = 2;
  int max_depth = 4;
  // Probability that a node above max_depth becomes a leaf early.
  double leaf_probability = 0.2;
};

DecisionTree RandomTree(std::mt19937_64& rng, const RandomTreeSpec& spec);
TreeEnsemble RandomEnsemble(std::mt19937_64& rng, const RandomTreeSpec& spec,
                            int n_trees);

// Uniform points in [0, 1]^F.
std::vector<double> RandomPoint(std::mt19937_64& rng, int n_features);

// True when every split threshold of the ensemble is at least `margin` away
// from the corresponding coordinate of x.
bool OffThreshold(const TreeEnsemble& ensemble, std::span<const double> x,
                  double margin);

// Correlated Gaussian features with a nonlinear binary label, rendered as a
// CSV with columns f0..f{F-1}, a categorical "group" column and "label".
std::string SyntheticCsv(int n_features, int n_rows, std::uint64_t seed);

// Writes <dir>/<name>.csv and <dir>/<name>.schema.json; returns the schema
// path.
std::filesystem::path WriteSyntheticDataset(const std::filesystem::path& dir,
                                            const std::string& name,
                                            int n_features, int n_rows,
                                            std::uint64_t seed);

// Fresh directory under the system temp dir.
std::filesystem::path TempDir(const std::string& tag);

}  // namespace treecf::testing

#endif  // TREECF_TESTS_SUPPORT_FIXTURES_H_
