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
#include <fstream>
#include <set>

#include "gtest/gtest.h"
#include "support/fixtures.h"
#include "treecf/errors.h"

namespace treecf {
namespace {

DatasetSchema Schema(std::vector<std::string> categorical = {},
                     std::optional<LabelThreshold> transform = std::nullopt) {
  DatasetSchema schema;
  schema.name = "toy";
  schema.label_column = "label";
  schema.categorical_columns = std::move(categorical);
  schema.label_transform = transform;
  return schema;
}

std::string ErrorOf(const std::string& csv, const DatasetSchema& schema) {
  try {
    LoadCsvText(csv, schema);
  } catch (const LoadError& e) {
    return e.what();
  }
  return "";
}

TEST(LoadCsvTest, NumericRows) {
  const Dataset d = LoadCsvText("a,b,label\n1,2,0\n3,4,1\n5,7,1\n", Schema());
  EXPECT_EQ(d.size(), 3u);
  EXPECT_EQ(d.n_features(), 2);
  EXPECT_EQ(d.n_classes(), 2);
  EXPECT_EQ(d.features[2], (std::vector<double>{5.0, 7.0}));
  EXPECT_EQ(d.labels, (std::vector<int>{0, 1, 1}));
  EXPECT_EQ(d.name, "toy");
}

TEST(LoadCsvTest, DropsCategoricalColumnsAndHandlesQuotes) {
  const Dataset d = LoadCsvText(
      "a,\"kind, long\",label,b\n1,\"x, y\",0,2\n2,z,1,3\n",
      Schema({"kind, long"}));
  EXPECT_EQ(d.feature_names, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(d.features[1], (std::vector<double>{2.0, 3.0}));
}

TEST(LoadCsvTest, DropsRowsWithMissingValues) {
  const Dataset d = LoadCsvText(
      "a,b,label\n1,2,0\nNA,4,1\n3,,1\n5,6,?\n7,8,1\n", Schema());
  EXPECT_EQ(d.size(), 2u);
  EXPECT_EQ(d.dropped_rows, 3u);
  for (const char* token : {"", "NA", "N/A", "NaN", "nan", "?", "null"}) {
    EXPECT_TRUE(IsMissingToken(token)) << token;
  }
  EXPECT_FALSE(IsMissingToken("0"));
}

TEST(LoadCsvTest, ThresholdLabelTransform) {
  const Dataset d = LoadCsvText("a,label\n1,5\n2,7\n3,8\n4,6.5\n",
                                Schema({}, LabelThreshold{7}));
  EXPECT_EQ(d.labels, (std::vector<int>{0, 1, 1, 0}));
}

TEST(LoadCsvTest, Errors) {
  EXPECT_NE(ErrorOf("a,b\n1,2\n3,4\n", Schema()).find("label"),
            std::string::npos);
  EXPECT_NE(ErrorOf("", Schema()).find("empty"), std::string::npos);
  const std::string degenerate = ErrorOf("a,b,label\n1,2,0\n1,3,1\n", Schema());
  EXPECT_NE(degenerate.find("degenerate feature"), std::string::npos);
  EXPECT_NE(degenerate.find("'a'"), std::string::npos);
  const std::string bad =
      ErrorOf("a,label\n1,0\nx,1\n3,1\nfoo,0\n", Schema());
  EXPECT_NE(bad.find("line(s) 3, 5"), std::string::npos) << bad;
  EXPECT_NE(ErrorOf("a,label\n1,0\n2,0.5\n", Schema()).find("line(s) 3"),
            std::string::npos);
  EXPECT_NE(ErrorOf("a,label\n1,0,3\n", Schema()).find("line 2"),
            std::string::npos);
  EXPECT_THROW(LoadCsv("/nonexistent/file.csv", Schema()), LoadError);
}

TEST(SchemaTest, ParsesAndResolvesPath) {
  const DatasetSchema s = DatasetSchema::FromJson(
      R"({"name": "wine", "label_column": "quality",
          "label_transform": {"kind": "threshold", "min": 7},
          "categorical_columns": ["color"], "csv_path": "wine.csv"})",
      "/data/dir");
  EXPECT_EQ(s.name, "wine");
  EXPECT_EQ(s.label_column, "quality");
  ASSERT_TRUE(s.label_transform.has_value());
  EXPECT_EQ(s.label_transform->min, 7.0);
  EXPECT_EQ(s.categorical_columns, (std::vector<std::string>{"color"}));
  EXPECT_EQ(s.csv_path, std::filesystem::path("/data/dir/wine.csv"));

  const DatasetSchema plain = DatasetSchema::FromJson(
      R"({"name": "x", "label_column": "y", "label_transform": null,
          "categorical_columns": [], "csv_path": "/abs/x.csv"})",
      "/elsewhere");
  EXPECT_FALSE(plain.label_transform.has_value());
  EXPECT_EQ(plain.csv_path, std::filesystem::path("/abs/x.csv"));

  EXPECT_THROW(DatasetSchema::FromJson("{\"name\": 1}"), LoadError);
  EXPECT_THROW(DatasetSchema::FromJson(
                   R"({"name": "x", "label_column": "y", "csv_path": "a",
                       "label_transform": {"kind": "quantile"}})"),
               LoadError);
  EXPECT_THROW(DatasetSchema::FromFile("/nonexistent.json"), LoadError);
}

TEST(SchemaTest, FileRoundTripThroughSyntheticWriter) {
  const auto dir = testing::TempDir("schema");
  const auto schema_path =
      testing::WriteSyntheticDataset(dir, "synth", 4, 50, 1);
  const DatasetSchema schema = DatasetSchema::FromFile(schema_path);
  EXPECT_EQ(schema.csv_path, dir / "synth.csv");
  const Dataset d = LoadCsv(schema.csv_path, schema);
  EXPECT_EQ(d.size(), 50u);
  EXPECT_EQ(d.n_features(), 4);
  EXPECT_EQ(d.n_classes(), 2);
}

TEST(MinMaxScalerTest, Examples) {
  MinMaxScaler scaler;
  EXPECT_THROW(scaler.Apply(Rows{{1.0}}), StateError);
  scaler.Fit(Rows{{2.0}, {4.0}, {6.0}});
  const Rows scaled = scaler.Apply(Rows{{2.0}, {4.0}, {6.0}, {8.0}});
  EXPECT_DOUBLE_EQ(scaled[0][0], 0.0);
  EXPECT_DOUBLE_EQ(scaled[1][0], 0.5);
  EXPECT_DOUBLE_EQ(scaled[2][0], 1.0);
  EXPECT_DOUBLE_EQ(scaled[3][0], 1.5);
  EXPECT_DOUBLE_EQ(scaler.Inverse(scaled)[3][0], 8.0);
  EXPECT_THROW(scaler.Apply(Rows{{1.0, 2.0}}), ArgumentError);

  const MinMaxScaler back = MinMaxScaler::FromJson(scaler.ToJson());
  EXPECT_EQ(back.mins(), scaler.mins());
  EXPECT_EQ(back.maxs(), scaler.maxs());
  MinMaxScaler constant;
  EXPECT_THROW(constant.Fit(Rows{{1.0}, {1.0}}), ArgumentError);
  EXPECT_THROW(constant.Fit(Rows{}), ArgumentError);
}

TEST(SplitTest, SizesAndDeterminism) {
  Dataset d;
  for (int i = 0; i < 10; ++i) {
    d.features.push_back({static_cast<double>(i)});
    d.labels.push_back(i % 2);
  }
  d.feature_names = {"a"};
  const SplitResult a = Split(d, {0.7, 3, true});
  EXPECT_EQ(a.train.size(), 7u);
  EXPECT_EQ(a.test.size(), 3u);
  const SplitResult b = Split(d, {0.7, 3, true});
  EXPECT_EQ(a.train_indices, b.train_indices);
  std::set<size_t> all(a.train_indices.begin(), a.train_indices.end());
  all.insert(a.test_indices.begin(), a.test_indices.end());
  EXPECT_EQ(all.size(), 10u);
  const SplitResult c = Split(d, {0.7, 4, true});
  EXPECT_NE(a.train_indices, c.train_indices);
  const SplitResult ordered = Split(d, {0.7, 0, false});
  EXPECT_EQ(ordered.test_indices, (std::vector<size_t>{7, 8, 9}));
  EXPECT_THROW(Split(d, {1.0, 0, true}), ArgumentError);
  EXPECT_THROW(Split(d, {0.05, 0, true}), ArgumentError);
}

TEST(PrepareDatasetTest, TrainScaledIntoUnitBox) {
  const auto dir = testing::TempDir("prepare");
  const auto schema = DatasetSchema::FromFile(
      testing::WriteSyntheticDataset(dir, "synth", 5, 200, 2));
  const PreparedData p = PrepareDataset(LoadCsv(schema.csv_path, schema),
                                        {0.7, 1, true});
  EXPECT_EQ(p.train.size(), 140u);
  EXPECT_EQ(p.test.size(), 60u);
  for (const auto& row : p.train.features) {
    for (double v : row) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

}  // namespace
}  // namespace treecf
