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

#ifndef TREECF_COUNTERFACTUAL_H_
#define TREECF_COUNTERFACTUAL_H_

#include <span>
#include <string>
#include <vector>

#include "treecf/model.h"

namespace treecf {

// Outcome of one counterfactual search, shared by every generator.
//
// When `valid` is false no prediction-flipping point was found; the result
// then carries counterfactual == original, best_distance == 0 and
// iteration_found == -1.
struct CounterfactualResult {
  std::vector<double> original;
  std::vector<double> counterfactual;
  bool valid = false;
  double best_distance = 0.0;
  int iteration_found = -1;  // 1-based step, candidate or sample number.
  int original_label = 0;
  int counterfactual_label = 0;
};

// Post-hoc validity check under the hard model, independent of any
// generator's bookkeeping.
inline bool FlipsPrediction(const TreeEnsemble& ensemble,
                            std::span<const double> x,
                            std::span<const double> x_bar) {
  return PredictLabel(ensemble, x) != PredictLabel(ensemble, x_bar);
}

// A result for an instance whose prediction could not be flipped.
inline CounterfactualResult InvalidResult(std::span<const double> x,
                                          int label) {
  CounterfactualResult result;
  result.original.assign(x.begin(), x.end());
  result.counterfactual = result.original;
  result.original_label = label;
  result.counterfactual_label = label;
  return result;
}

}  // namespace treecf

#endif  // TREECF_COUNTERFACTUAL_H_
