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

#ifndef TREECF_DATAIO_H_
#define TREECF_DATAIO_H_

// Tabular dataset ingestion: CSV load with categorical-column removal,
// train/test split and min-max scaling fitted on the training split.
//
// Schema file (JSON):
//   {"name": "...", "label_column": "...",
//    "label_transform": null | {"kind": "threshold", "min": 7},
//    "categorical_columns": [...], "csv_path": "relative/or/absolute.csv"}
//
// A threshold transform maps label >= min to 1 and everything else to 0.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace treecf {

using Rows = std::vector<std::vector<double>>;

struct LabelThreshold {
  double min = 0.0;
};

struct DatasetSchema {
  std::string name;
  std::string label_column;
  std::optional<LabelThreshold> label_transform;
  std::vector<std::string> categorical_columns;
  std::filesystem::path csv_path;

  // Throws LoadError. A relative csv_path is resolved against `base_dir`.
  static DatasetSchema FromJson(std::string_view text,
                                const std::filesystem::path& base_dir = {});
  static DatasetSchema FromFile(const std::filesystem::path& path);
};

struct Dataset {
  std::string name;
  Rows features;
  std::vector<int> labels;
  std::vector<std::string> feature_names;
  size_t dropped_rows = 0;  // Rows skipped for missing values.

  size_t size() const { return features.size(); }
  int n_features() const { return static_cast<int>(feature_names.size()); }
  int n_classes() const;
};

// Tokens treated as missing; rows holding one are dropped and counted.
bool IsMissingToken(std::string_view field);

// Throws LoadError for a missing file or label column, an empty file,
// unparseable numbers (listing line numbers), non-integer labels, and
// constant ("degenerate") feature columns.
Dataset LoadCsv(const std::filesystem::path& path, const DatasetSchema& schema);
Dataset LoadCsvText(std::string_view text, const DatasetSchema& schema);

// Per-feature x' = (x - min) / (max - min). Values outside the fitted range
// map outside [0, 1] and are not clipped.
class MinMaxScaler {
 public:
  // Throws ArgumentError for empty input or a constant column.
  void Fit(std::span<const std::vector<double>> rows);
  // Throws StateError before Fit.
  Rows Apply(std::span<const std::vector<double>> rows) const;
  Rows Inverse(std::span<const std::vector<double>> rows) const;

  bool fitted() const { return !mins_.empty(); }
  const std::vector<double>& mins() const { return mins_; }
  const std::vector<double>& maxs() const { return maxs_; }

  // {"mins": [...], "maxs": [...]}.
  std::string ToJson() const;
  static MinMaxScaler FromJson(std::string_view text);

 private:
  void CheckFitted(std::span<const std::vector<double>> rows) const;

  std::vector<double> mins_;
  std::vector<double> maxs_;
};

struct SplitSpec {
  double train_fraction = 0.7;
  std::uint64_t seed = 0;
  bool shuffle = true;
};

struct SplitResult {
  Dataset train;
  Dataset test;
  std::vector<size_t> train_indices;
  std::vector<size_t> test_indices;
};

// floor(fraction * N) rows go to train, the rest to test. Throws
// ArgumentError for N < 2 or a fraction outside (0, 1).
SplitResult Split(const Dataset& dataset, const SplitSpec& spec);

struct PreparedData {
  Dataset train;  // Scaled.
  Dataset test;   // Scaled with the training statistics.
  MinMaxScaler scaler;
};

// Split, then fit the scaler on train and apply it to both halves.
PreparedData PrepareDataset(const Dataset& dataset, const SplitSpec& spec);

}  // namespace treecf

#endif  // TREECF_DATAIO_H_
