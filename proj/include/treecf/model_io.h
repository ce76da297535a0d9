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

#ifndef TREECF_MODEL_IO_H_
#define TREECF_MODEL_IO_H_

// Portable JSON model format (UTF-8):
//
//   {"format_version": 1,
//    "model_kind": "decision_tree" | "random_forest" | "adaboost",
//    "n_classes": K,
//    "feature_names": [...],
//    "child_convention": "gt_left",
//    "trees": [{"weight": w, "root": 0, "nodes": [
//        {"id": 0, "kind": "internal", "feature": f, "threshold": t,
//         "left": 1, "right": 2},
//        {"id": 1, "kind": "leaf", "distribution": [...]}, ...]}]}
//
// Any child_convention other than "gt_left" is rejected.

#include <filesystem>
#include <string>
#include <string_view>

#include "treecf/model.h"

namespace treecf {

inline constexpr int kModelFormatVersion = 1;

// Throws LoadError; structural problems name the tree and node.
TreeEnsemble LoadModel(std::string_view json_text);
TreeEnsemble LoadModelFile(const std::filesystem::path& path);

std::string SaveModel(const TreeEnsemble& ensemble);
void SaveModelFile(const TreeEnsemble& ensemble,
                   const std::filesystem::path& path);

}  // namespace treecf

#endif  // TREECF_MODEL_IO_H_
