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

#include "treecf/model_io.h"

#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

#include "json.hpp"
#include "treecf/errors.h"

namespace treecf {
namespace {

using nlohmann::json;

const json& Require(const json& object, const char* key,
                    const std::string& where) {
  const auto it = object.find(key);
  if (it == object.end()) {
    throw LoadError(where + ": missing field '" + key + "'");
  }
  return *it;
}

TreeNode ParseNode(const json& j, const std::string& where) {
  if (!j.is_object()) throw LoadError(where + ": node is not an object");
  TreeNode node;
  node.id = Require(j, "id", where).get<int>();
  const std::string node_where = where + " node " + std::to_string(node.id);
  const std::string kind = Require(j, "kind", node_where).get<std::string>();
  if (kind == "leaf") {
    node.kind = NodeKind::kLeaf;
    node.distribution =
        Require(j, "distribution", node_where).get<std::vector<double>>();
  } else if (kind == "internal") {
    node.kind = NodeKind::kInternal;
    node.feature = Require(j, "feature", node_where).get<int>();
    node.threshold = Require(j, "threshold", node_where).get<double>();
    node.left = Require(j, "left", node_where).get<int>();
    node.right = Require(j, "right", node_where).get<int>();
  } else {
    throw LoadError(node_where + ": unknown node kind '" + kind + "'");
  }
  return node;
}

TreeEnsemble FromJson(const json& root) {
  if (!root.is_object()) throw LoadError("model: top level is not an object");
  const int version = Require(root, "format_version", "model").get<int>();
  if (version != kModelFormatVersion) {
    throw LoadError("model: unsupported format_version " +
                    std::to_string(version));
  }
  if (!root.contains("child_convention")) {
    throw LoadError("model: missing child_convention flag");
  }
  const std::string convention = root.at("child_convention").get<std::string>();
  if (convention != "gt_left") {
    throw LoadError("model: child_convention must be \"gt_left\", got \"" +
                    convention + "\"");
  }
  ModelKind kind;
  try {
    kind = ParseModelKind(Require(root, "model_kind", "model").get<std::string>());
  } catch (const ArgumentError& e) {
    throw LoadError(std::string("model: ") + e.what());
  }
  const int n_classes = Require(root, "n_classes", "model").get<int>();
  std::vector<std::string> feature_names;
  if (root.contains("feature_names")) {
    feature_names = root.at("feature_names").get<std::vector<std::string>>();
  }
  const json& trees_json = Require(root, "trees", "model");
  if (!trees_json.is_array()) throw LoadError("model: trees is not an array");

  std::vector<DecisionTree> trees;
  std::vector<double> weights;
  for (size_t m = 0; m < trees_json.size(); ++m) {
    const std::string where = "tree " + std::to_string(m);
    const json& t = trees_json[m];
    weights.push_back(Require(t, "weight", where).get<double>());
    const int root_id = Require(t, "root", where).get<int>();
    const json& nodes_json = Require(t, "nodes", where);
    if (!nodes_json.is_array()) throw LoadError(where + ": nodes is not an array");
    std::vector<TreeNode> nodes;
    nodes.reserve(nodes_json.size());
    for (const json& n : nodes_json) nodes.push_back(ParseNode(n, where));
    try {
      trees.emplace_back(std::move(nodes), root_id, n_classes);
    } catch (const StructuralError& e) {
      throw LoadError(where + " " + e.what());
    }
  }
  try {
    return TreeEnsemble(kind, n_classes, std::move(feature_names),
                        std::move(trees), std::move(weights));
  } catch (const StructuralError& e) {
    throw LoadError(std::string("model: ") + e.what());
  }
}

}  // namespace

TreeEnsemble LoadModel(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw LoadError(std::string("model: invalid JSON: ") + e.what());
  }
  try {
    return FromJson(root);
  } catch (const json::exception& e) {
    throw LoadError(std::string("model: schema violation: ") + e.what());
  }
}

TreeEnsemble LoadModelFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open model file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return LoadModel(buffer.str());
}

std::string SaveModel(const TreeEnsemble& ensemble) {
  json trees = json::array();
  for (size_t m = 0; m < ensemble.trees().size(); ++m) {
    const DecisionTree& tree = ensemble.trees()[m];
    json nodes = json::array();
    for (const TreeNode& node : tree.nodes()) {
      if (node.is_leaf()) {
        nodes.push_back({{"id", node.id},
                         {"kind", "leaf"},
                         {"distribution", node.distribution}});
      } else {
        nodes.push_back({{"id", node.id},
                         {"kind", "internal"},
                         {"feature", node.feature},
                         {"threshold", node.threshold},
                         {"left", node.left},
                         {"right", node.right}});
      }
    }
    trees.push_back({{"weight", ensemble.weights()[m]},
                     {"root", tree.root_id()},
                     {"nodes", std::move(nodes)}});
  }
  const json root = {{"format_version", kModelFormatVersion},
                     {"model_kind", ModelKindName(ensemble.kind())},
                     {"n_classes", ensemble.n_classes()},
                     {"feature_names", ensemble.feature_names()},
                     {"child_convention", "gt_left"},
                     {"trees", std::move(trees)}};
  return root.dump(1);
}

void SaveModelFile(const TreeEnsemble& ensemble,
                   const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write model file " + path.string());
  out << SaveModel(ensemble) << '\n';
}

}  // namespace treecf
