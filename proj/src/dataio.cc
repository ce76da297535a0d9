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

#include "treecf/dataio.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "json.hpp"
#include "treecf/errors.h"

namespace treecf {
namespace {

constexpr size_t kMaxReportedLines = 10;

std::string_view Trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

// Splits one CSV record; supports double-quoted fields with "" escapes.
std::vector<std::string> SplitCsvLine(std::string_view line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::string(Trim(field)));
      field.clear();
    } else {
      field += c;
    }
  }
  fields.push_back(std::string(Trim(field)));
  return fields;
}

std::optional<double> ParseNumber(std::string_view text) {
  text = Trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty() ||
      !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::string JoinLines(const std::vector<size_t>& lines) {
  std::string out;
  for (size_t i = 0; i < lines.size() && i < kMaxReportedLines; ++i) {
    if (i > 0) out += ", ";
    out += std::to_string(lines[i]);
  }
  if (lines.size() > kMaxReportedLines) out += ", ...";
  return out;
}

Dataset Subset(const Dataset& dataset, std::span<const size_t> indices) {
  Dataset subset;
  subset.name = dataset.name;
  subset.feature_names = dataset.feature_names;
  for (size_t i : indices) {
    subset.features.push_back(dataset.features[i]);
    subset.labels.push_back(dataset.labels[i]);
  }
  return subset;
}

}  // namespace

DatasetSchema DatasetSchema::FromJson(std::string_view text,
                                      const std::filesystem::path& base_dir) {
  try {
    const auto j = nlohmann::json::parse(text);
    DatasetSchema schema;
    schema.name = j.value("name", "");
    schema.label_column = j.at("label_column").get<std::string>();
    if (j.contains("label_transform") && !j.at("label_transform").is_null()) {
      const auto& t = j.at("label_transform");
      const std::string kind = t.at("kind").get<std::string>();
      if (kind != "threshold") {
        throw LoadError("schema: unknown label_transform kind '" + kind + "'");
      }
      schema.label_transform = LabelThreshold{t.at("min").get<double>()};
    }
    if (j.contains("categorical_columns")) {
      schema.categorical_columns =
          j.at("categorical_columns").get<std::vector<std::string>>();
    }
    std::filesystem::path csv = j.at("csv_path").get<std::string>();
    schema.csv_path = csv.is_relative() && !base_dir.empty() ? base_dir / csv
                                                             : csv;
    return schema;
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("schema: ") + e.what());
  }
}

DatasetSchema DatasetSchema::FromFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open schema file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return FromJson(buffer.str(), path.parent_path());
}

int Dataset::n_classes() const {
  int max_label = -1;
  for (int y : labels) max_label = std::max(max_label, y);
  return max_label + 1;
}

bool IsMissingToken(std::string_view field) {
  field = Trim(field);
  return field.empty() || field == "NA" || field == "N/A" || field == "NaN" ||
         field == "nan" || field == "?" || field == "null";
}

Dataset LoadCsvText(std::string_view text, const DatasetSchema& schema) {
  std::istringstream in{std::string(text)};
  std::string line;
  size_t line_number = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_number;
    if (!Trim(line).empty()) {
      header = SplitCsvLine(line);
      break;
    }
  }
  if (header.empty()) throw LoadError("empty file");

  int label_index = -1;
  std::vector<int> feature_columns;
  Dataset dataset;
  dataset.name = schema.name;
  for (int c = 0; c < static_cast<int>(header.size()); ++c) {
    if (header[c] == schema.label_column) {
      label_index = c;
    } else if (std::find(schema.categorical_columns.begin(),
                         schema.categorical_columns.end(),
                         header[c]) == schema.categorical_columns.end()) {
      feature_columns.push_back(c);
      dataset.feature_names.push_back(header[c]);
    }
  }
  if (label_index < 0) {
    throw LoadError("missing label column '" + schema.label_column + "'");
  }

  std::vector<std::vector<size_t>> bad_lines(header.size());
  std::vector<size_t> bad_labels;
  while (std::getline(in, line)) {
    ++line_number;
    if (Trim(line).empty()) continue;
    const std::vector<std::string> fields = SplitCsvLine(line);
    if (fields.size() != header.size()) {
      throw LoadError("line " + std::to_string(line_number) + " has " +
                      std::to_string(fields.size()) + " fields, header has " +
                      std::to_string(header.size()));
    }
    bool missing = IsMissingToken(fields[label_index]);
    for (int c : feature_columns) missing = missing || IsMissingToken(fields[c]);
    if (missing) {
      ++dataset.dropped_rows;
      continue;
    }
    std::vector<double> row;
    row.reserve(feature_columns.size());
    bool ok = true;
    for (int c : feature_columns) {
      const auto value = ParseNumber(fields[c]);
      if (!value) {
        bad_lines[c].push_back(line_number);
        ok = false;
      } else {
        row.push_back(*value);
      }
    }
    const auto label_value = ParseNumber(fields[label_index]);
    int label = 0;
    if (!label_value) {
      bad_lines[label_index].push_back(line_number);
      ok = false;
    } else if (schema.label_transform) {
      label = *label_value >= schema.label_transform->min ? 1 : 0;
    } else if (*label_value < 0 || std::floor(*label_value) != *label_value) {
      bad_labels.push_back(line_number);
      ok = false;
    } else {
      label = static_cast<int>(*label_value);
    }
    if (ok) {
      dataset.features.push_back(std::move(row));
      dataset.labels.push_back(label);
    }
  }
  for (size_t c = 0; c < header.size(); ++c) {
    if (!bad_lines[c].empty()) {
      throw LoadError("unparseable numeric value in column '" + header[c] +
                      "' at line(s) " + JoinLines(bad_lines[c]));
    }
  }
  if (!bad_labels.empty()) {
    throw LoadError("label is not a non-negative integer at line(s) " +
                    JoinLines(bad_labels));
  }
  if (dataset.features.empty()) throw LoadError("no data rows");
  for (int f = 0; f < dataset.n_features(); ++f) {
    const double first = dataset.features[0][f];
    const bool constant =
        std::all_of(dataset.features.begin(), dataset.features.end(),
                    [&](const auto& row) { return row[f] == first; });
    if (constant) {
      throw LoadError("degenerate feature '" + dataset.feature_names[f] +
                      "' (min == max)");
    }
  }
  return dataset;
}

Dataset LoadCsv(const std::filesystem::path& path,
                const DatasetSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open data file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return LoadCsvText(buffer.str(), schema);
}

void MinMaxScaler::Fit(std::span<const std::vector<double>> rows) {
  if (rows.empty()) throw ArgumentError("cannot fit a scaler on no rows");
  const size_t f = rows[0].size();
  std::vector<double> mins(rows[0]), maxs(rows[0]);
  for (const auto& row : rows) {
    if (row.size() != f) throw ArgumentError("ragged rows");
    for (size_t i = 0; i < f; ++i) {
      mins[i] = std::min(mins[i], row[i]);
      maxs[i] = std::max(maxs[i], row[i]);
    }
  }
  for (size_t i = 0; i < f; ++i) {
    if (!(mins[i] < maxs[i])) {
      throw ArgumentError("degenerate feature " + std::to_string(i) +
                          " in scaler fit (min == max)");
    }
  }
  mins_ = std::move(mins);
  maxs_ = std::move(maxs);
}

void MinMaxScaler::CheckFitted(
    std::span<const std::vector<double>> rows) const {
  if (!fitted()) throw StateError("scaler used before fit");
  for (const auto& row : rows) {
    if (row.size() != mins_.size()) {
      throw ArgumentError("row width does not match the fitted scaler");
    }
  }
}

Rows MinMaxScaler::Apply(std::span<const std::vector<double>> rows) const {
  CheckFitted(rows);
  Rows out(rows.begin(), rows.end());
  for (auto& row : out) {
    for (size_t i = 0; i < row.size(); ++i) {
      row[i] = (row[i] - mins_[i]) / (maxs_[i] - mins_[i]);
    }
  }
  return out;
}

Rows MinMaxScaler::Inverse(std::span<const std::vector<double>> rows) const {
  CheckFitted(rows);
  Rows out(rows.begin(), rows.end());
  for (auto& row : out) {
    for (size_t i = 0; i < row.size(); ++i) {
      row[i] = mins_[i] + row[i] * (maxs_[i] - mins_[i]);
    }
  }
  return out;
}

std::string MinMaxScaler::ToJson() const {
  return nlohmann::json{{"mins", mins_}, {"maxs", maxs_}}.dump();
}

MinMaxScaler MinMaxScaler::FromJson(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    MinMaxScaler scaler;
    scaler.mins_ = j.at("mins").get<std::vector<double>>();
    scaler.maxs_ = j.at("maxs").get<std::vector<double>>();
    if (scaler.mins_.size() != scaler.maxs_.size()) {
      throw LoadError("scaler: mins and maxs differ in length");
    }
    return scaler;
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("scaler: ") + e.what());
  }
}

SplitResult Split(const Dataset& dataset, const SplitSpec& spec) {
  if (dataset.size() < 2) throw ArgumentError("split needs at least 2 rows");
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw ArgumentError("train fraction must be in (0, 1)");
  }
  std::vector<size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  if (spec.shuffle) {
    std::mt19937_64 rng(spec.seed);
    std::shuffle(order.begin(), order.end(), rng);
  }
  const auto n_train = static_cast<size_t>(
      std::floor(spec.train_fraction * static_cast<double>(dataset.size()) + 1e-9));
  if (n_train == 0 || n_train == dataset.size()) {
    throw ArgumentError("split leaves the train or test side empty");
  }
  SplitResult result;
  result.train_indices.assign(order.begin(), order.begin() + n_train);
  result.test_indices.assign(order.begin() + n_train, order.end());
  result.train = Subset(dataset, result.train_indices);
  result.test = Subset(dataset, result.test_indices);
  return result;
}

PreparedData PrepareDataset(const Dataset& dataset, const SplitSpec& spec) {
  SplitResult split = Split(dataset, spec);
  PreparedData prepared;
  prepared.scaler.Fit(split.train.features);
  split.train.features = prepared.scaler.Apply(split.train.features);
  split.test.features = prepared.scaler.Apply(split.test.features);
  prepared.train = std::move(split.train);
  prepared.test = std::move(split.test);
  return prepared;
}

}  // namespace treecf
