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

#include "treecf/results_io.h"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "treecf/errors.h"

namespace treecf {

using nlohmann::json;

std::string ResultToJsonLine(size_t index, std::string_view method,
                             const CounterfactualResult& result) {
  const json line = {{"index", index},
                     {"method", method},
                     {"valid", result.valid},
                     {"distance", result.best_distance},
                     {"iteration_found", result.iteration_found},
                     {"x", result.original},
                     {"x_cf", result.counterfactual},
                     {"y", result.original_label},
                     {"y_cf", result.counterfactual_label}};
  return line.dump();
}

IndexedResult ResultFromJsonLine(std::string_view line) {
  try {
    const json j = json::parse(line);
    IndexedResult out;
    out.index = j.at("index").get<size_t>();
    out.method = j.value("method", "");
    out.result.valid = j.at("valid").get<bool>();
    out.result.best_distance = j.at("distance").get<double>();
    out.result.iteration_found = j.at("iteration_found").get<int>();
    out.result.original = j.at("x").get<std::vector<double>>();
    out.result.counterfactual = j.at("x_cf").get<std::vector<double>>();
    out.result.original_label = j.at("y").get<int>();
    out.result.counterfactual_label = j.at("y_cf").get<int>();
    return out;
  } catch (const json::exception& e) {
    throw LoadError(e.what());
  }
}

void WriteResultsJsonl(const std::filesystem::path& path,
                       std::string_view method,
                       std::span<const CounterfactualResult> results) {
  std::ostringstream out;
  for (size_t i = 0; i < results.size(); ++i) {
    out << ResultToJsonLine(i, method, results[i]) << '\n';
  }
  WriteTextFile(path, out.str());
}

std::vector<IndexedResult> ReadResultsJsonl(const std::filesystem::path& path) {
  std::istringstream in(ReadTextFile(path));
  std::vector<IndexedResult> results;
  std::string line;
  for (int line_number = 1; std::getline(in, line); ++line_number) {
    if (line.empty()) continue;
    try {
      results.push_back(ResultFromJsonLine(line));
    } catch (const LoadError& e) {
      throw LoadError(path.string() + ":" + std::to_string(line_number) +
                      ": " + e.what());
    }
  }
  return results;
}

std::string TraceToCsv(std::span<const TracePoint> points) {
  std::ostringstream out;
  out << std::setprecision(12);
  out << "iteration,mean_distance,mean_reported_distance,cumulative_validity\n";
  for (const TracePoint& p : points) {
    out << p.iteration << ',' << p.mean_distance << ','
        << p.mean_reported_distance << ',' << p.cumulative_validity << '\n';
  }
  return out.str();
}

std::string SweepToCsv(std::span<const SweepEntry> entries) {
  std::ostringstream out;
  out << std::setprecision(12);
  out << "sigma,tau,beta,alpha,validity_pct,d_mean\n";
  for (const SweepEntry& e : entries) {
    out << e.config.params.sigma << ',' << e.config.params.tau << ','
        << e.config.beta << ',' << e.config.learning_rate << ','
        << e.validity_pct() << ',';
    if (std::isnan(e.d_mean)) {
      out << "nan";
    } else {
      out << e.d_mean;
    }
    out << '\n';
  }
  return out.str();
}

void WriteTextFile(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write " + path.string());
  out << text;
}

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace treecf
