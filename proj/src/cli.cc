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

#include "treecf/cli.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "treecf/baselines.h"
#include "treecf/dataio.h"
#include "treecf/distance.h"
#include "treecf/errors.h"
#include "treecf/evaluation.h"
#include "treecf/focus.h"
#include "treecf/model_io.h"
#include "treecf/results_io.h"
#include "treecf/soft_model.h"

namespace treecf::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class UsageError : public Error {
 public:
  using Error::Error;
};

// Values as given on the command line; unset means "not given".
struct FlagValues {
  std::optional<std::string> manifest;
  std::optional<std::string> model;
  std::optional<std::string> data_schema;
  std::optional<std::string> method;
  std::optional<std::string> distance;
  std::optional<std::string> out;
  std::optional<std::string> grid;
  std::optional<std::string> results_a;
  std::optional<std::string> results_b;
  std::optional<std::string> dataset_name;
  std::optional<std::string> model_name;
  std::optional<double> sigma;
  std::optional<double> tau;
  std::optional<double> beta;
  std::optional<double> lr;
  std::optional<double> epsilon;
  std::optional<double> noise_std;
  std::optional<int> iters;
  std::optional<int> samples;
  std::optional<int> workers;
  std::optional<int> max_instances;
  std::optional<std::uint64_t> seed;
  bool clamp = false;
};

// Fully resolved run description, written next to every run's outputs.
struct RunManifest {
  std::string command;
  std::string model;
  std::string data_schema;
  std::string method = "focus";
  std::string distance = "euclidean";
  double sigma = 10.0;
  double tau = 1.0;
  double beta = 0.01;
  double lr = 0.01;
  int iters = 1000;
  bool clamp = false;
  std::optional<double> epsilon;  // Unset: chosen from the default grid.
  int samples = 1000;
  double noise_std = 0.5;
  std::uint64_t seed = 0;
  int workers = 0;
  int max_instances = 0;  // 0: the whole test split.
  std::string out;
  std::string grid;
  std::string results_a;
  std::string results_b;
  std::string dataset_name;
  std::string model_name;

  json ToJson() const {
    json j = {{"command", command},     {"model", model},
              {"data_schema", data_schema}, {"method", method},
              {"distance", distance},   {"sigma", sigma},
              {"tau", tau},             {"beta", beta},
              {"lr", lr},               {"iters", iters},
              {"clamp", clamp},         {"samples", samples},
              {"noise_std", noise_std}, {"seed", seed},
              {"workers", workers},     {"max_instances", max_instances},
              {"out", out},             {"grid", grid},
              {"results_a", results_a}, {"results_b", results_b},
              {"dataset_name", dataset_name}, {"model_name", model_name}};
    j["epsilon"] = epsilon ? json(*epsilon) : json(nullptr);
    return j;
  }
};

template <typename T>
T Pick(const std::optional<T>& flag, const json& manifest, const char* key,
       T fallback) {
  if (flag) return *flag;
  if (manifest.contains(key) && !manifest.at(key).is_null()) {
    try {
      return manifest.at(key).get<T>();
    } catch (const json::exception&) {
      throw UsageError(std::string("manifest field '") + key +
                       "' has the wrong type");
    }
  }
  return fallback;
}

RunManifest Resolve(const std::string& command, const FlagValues& flags) {
  json file = json::object();
  if (flags.manifest) {
    std::string text;
    try {
      text = ReadTextFile(*flags.manifest);
      file = json::parse(text);
    } catch (const LoadError& e) {
      throw UsageError(e.what());
    } catch (const json::exception& e) {
      throw UsageError("manifest is not valid JSON: " + std::string(e.what()));
    }
    if (!file.is_object()) throw UsageError("manifest must be a JSON object");
  }
  RunManifest m;
  m.command = command;
  m.model = Pick(flags.model, file, "model", m.model);
  m.data_schema = Pick(flags.data_schema, file, "data_schema", m.data_schema);
  m.method = Pick(flags.method, file, "method", m.method);
  m.distance = Pick(flags.distance, file, "distance", m.distance);
  m.sigma = Pick(flags.sigma, file, "sigma", m.sigma);
  m.tau = Pick(flags.tau, file, "tau", m.tau);
  m.beta = Pick(flags.beta, file, "beta", m.beta);
  m.lr = Pick(flags.lr, file, "lr", m.lr);
  m.iters = Pick(flags.iters, file, "iters", m.iters);
  m.clamp = flags.clamp || Pick(std::optional<bool>(), file, "clamp", false);
  if (flags.epsilon) {
    m.epsilon = flags.epsilon;
  } else if (file.contains("epsilon") && !file.at("epsilon").is_null()) {
    m.epsilon = Pick(std::optional<double>(), file, "epsilon", 0.0);
  }
  m.samples = Pick(flags.samples, file, "samples", m.samples);
  m.noise_std = Pick(flags.noise_std, file, "noise_std", m.noise_std);
  m.seed = Pick(flags.seed, file, "seed", m.seed);
  m.workers = Pick(flags.workers, file, "workers", m.workers);
  m.max_instances = Pick(flags.max_instances, file, "max_instances",
                         m.max_instances);
  m.out = Pick(flags.out, file, "out", m.out);
  m.grid = Pick(flags.grid, file, "grid", m.grid);
  m.results_a = Pick(flags.results_a, file, "results_a", m.results_a);
  m.results_b = Pick(flags.results_b, file, "results_b", m.results_b);
  m.dataset_name = Pick(flags.dataset_name, file, "dataset_name",
                        m.dataset_name);
  m.model_name = Pick(flags.model_name, file, "model_name", m.model_name);
  return m;
}

void RequireFile(const std::string& path, const char* what) {
  if (path.empty()) throw UsageError(std::string("missing --") + what);
  if (!fs::is_regular_file(path)) {
    throw UsageError(std::string(what) + " file not found: " + path);
  }
}

fs::path PrepareOutDir(const RunManifest& m) {
  if (m.out.empty()) throw UsageError("missing --out");
  std::error_code ec;
  fs::create_directories(m.out, ec);
  if (ec || !fs::is_directory(m.out)) {
    throw UsageError("cannot create output directory " + m.out);
  }
  return m.out;
}

void WriteManifest(const RunManifest& m, const fs::path& dir,
                   const json& extra = json::object()) {
  json j = m.ToJson();
  for (const auto& [key, value] : extra.items()) j[key] = value;
  WriteTextFile(dir / "manifest.json", j.dump(2) + "\n");
}

struct Workload {
  TreeEnsemble model;
  PreparedData data;
  Rows instances;
};

Workload LoadWorkload(const RunManifest& m) {
  RequireFile(m.model, "model");
  RequireFile(m.data_schema, "data-schema");
  if (m.max_instances < 0) throw UsageError("--max-instances must be >= 0");
  TreeEnsemble model = LoadModelFile(m.model);
  const DatasetSchema schema = DatasetSchema::FromFile(m.data_schema);
  const Dataset dataset = LoadCsv(schema.csv_path, schema);
  PreparedData data = PrepareDataset(dataset, SplitSpec{0.7, m.seed, true});
  if (!model.feature_names().empty() &&
      model.feature_names() != data.test.feature_names) {
    throw UsageError("model feature names do not match the dataset columns");
  }
  if (model.n_features() > data.test.n_features()) {
    throw UsageError("model uses more features than the dataset provides");
  }
  Rows instances = data.test.features;
  if (m.max_instances > 0 &&
      instances.size() > static_cast<size_t>(m.max_instances)) {
    instances.resize(m.max_instances);
  }
  return {std::move(model), std::move(data), std::move(instances)};
}

Distance MakeDistance(const std::string& name, const Rows* train,
                      const fs::path& cache_dir) {
  DistanceKind kind;
  try {
    kind = ParseDistanceKind(name);
  } catch (const ArgumentError& e) {
    throw UsageError(e.what());
  }
  if (kind != DistanceKind::kMahalanobis) return Distance::FromKind(kind);
  if (train == nullptr) {
    throw UsageError("mahalanobis distance needs --data-schema");
  }
  return Distance::Mahalanobis(CachedCovariance(*train, cache_dir));
}

FocusConfig MakeFocusConfig(const RunManifest& m, const Distance& distance) {
  FocusConfig config;
  config.params = {m.sigma, m.tau};
  config.beta = m.beta;
  config.learning_rate = m.lr;
  config.iterations = m.iters;
  config.distance = distance;
  config.clamp_to_unit_box = m.clamp;
  try {
    config.Validate();
  } catch (const ArgumentError& e) {
    throw UsageError(e.what());
  }
  return config;
}

std::string Summary(std::span<const CounterfactualResult> results) {
  size_t valid = 0;
  double sum = 0.0;
  for (const auto& r : results) {
    if (r.valid) {
      ++valid;
      sum += r.best_distance;
    }
  }
  std::ostringstream out;
  out << "valid " << valid << "/" << results.size() << ", d_mean ";
  if (valid == 0) {
    out << "nan";
  } else {
    out << std::setprecision(6) << sum / valid;
  }
  return out.str();
}

int CmdGenerate(const RunManifest& m, std::ostream& out, bool trace_only) {
  const Workload work = LoadWorkload(m);
  const fs::path dir = PrepareOutDir(m);
  WriteTextFile(dir / "scaler.json", work.data.scaler.ToJson() + "\n");
  const Distance distance = MakeDistance(m.distance, &work.data.train.features, dir);
  json extra = json::object();
  std::vector<CounterfactualResult> results;
  if (m.method == "focus" || trace_only) {
    const FocusConfig config = MakeFocusConfig(m, distance);
    std::vector<IterationTrace> traces;
    results = GenerateCounterfactuals(work.model, config, work.instances,
                                      m.workers, &traces);
    WriteTextFile(dir / "trace.csv", TraceToCsv(AggregateTraces(traces)));
  } else if (m.method == "ft") {
    if (m.epsilon) {
      FtConfig config{*m.epsilon};
      try {
        config.Validate();
      } catch (const ArgumentError& e) {
        throw UsageError(e.what());
      }
      results = FtGenerateAll(work.model, config, work.instances, distance,
                              m.workers);
      extra["epsilon_selected"] = *m.epsilon;
    } else {
      const auto grid = FtConfig::DefaultEpsilonGrid();
      FtSelection selection = FtSelectEpsilon(work.model, grid, work.instances,
                                              distance, m.workers);
      results = std::move(selection.results);
      extra["epsilon_selected"] = selection.epsilon;
    }
  } else if (m.method == "rp") {
    RpConfig config{m.samples, m.noise_std, m.seed};
    try {
      config.Validate();
    } catch (const ArgumentError& e) {
      throw UsageError(e.what());
    }
    results = RpGenerateAll(work.model, config, work.instances, distance,
                            m.workers);
  } else {
    throw UsageError("unknown method '" + m.method + "'");
  }
  WriteManifest(m, dir, extra);
  if (!trace_only) {
    WriteResultsJsonl(dir / "results.jsonl", m.method, results);
  }
  const std::string summary = Summary(results);
  WriteTextFile(dir / "summary.txt", summary + "\n");
  out << summary << "\n";
  return kExitOk;
}

SweepGrid LoadGrid(const std::string& path) {
  if (path.empty()) return SweepGrid::Default();
  RequireFile(path, "grid");
  SweepGrid grid;
  try {
    const json j = json::parse(ReadTextFile(path));
    grid.sigmas = j.at("sigma").get<std::vector<double>>();
    grid.taus = j.at("tau").get<std::vector<double>>();
    grid.betas = j.at("beta").get<std::vector<double>>();
    grid.learning_rates = j.at("alpha").get<std::vector<double>>();
    grid.Validate();
  } catch (const json::exception& e) {
    throw UsageError("grid file: " + std::string(e.what()));
  } catch (const ArgumentError& e) {
    throw UsageError("grid file: " + std::string(e.what()));
  }
  return grid;
}

int CmdSweep(const RunManifest& m, std::ostream& out) {
  const SweepGrid grid = LoadGrid(m.grid);
  const Workload work = LoadWorkload(m);
  const fs::path dir = PrepareOutDir(m);
  const Distance distance = MakeDistance(m.distance, &work.data.train.features, dir);
  const FocusConfig base = MakeFocusConfig(m, distance);
  const SweepOutcome outcome =
      SweepHyperparameters(work.model, grid, work.instances, base, m.workers);
  WriteTextFile(dir / "sweep.csv", SweepToCsv(outcome.entries));
  const SweepEntry& best = outcome.best();
  const json best_json = {{"sigma", best.config.params.sigma},
                          {"tau", best.config.params.tau},
                          {"beta", best.config.beta},
                          {"alpha", best.config.learning_rate},
                          {"validity_pct", best.validity_pct()},
                          {"d_mean", std::isnan(best.d_mean)
                                         ? json(nullptr)
                                         : json(best.d_mean)},
                          {"complete", outcome.complete}};
  WriteTextFile(dir / "best_config.json", best_json.dump(2) + "\n");
  WriteResultsJsonl(dir / "results.jsonl", "focus", outcome.best_results);
  WriteManifest(m, dir);
  out << "best sigma=" << best.config.params.sigma
      << " tau=" << best.config.params.tau << " beta=" << best.config.beta
      << " alpha=" << best.config.learning_rate << " "
      << Summary(outcome.best_results)
      << (outcome.complete ? "" : " [incomplete]") << "\n";
  return kExitOk;
}

MethodRun ReadRun(const std::string& path) {
  RequireFile(path, "results");
  std::vector<IndexedResult> rows = ReadResultsJsonl(path);
  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return a.index < b.index; });
  MethodRun run;
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].index != i) {
      throw UsageError(path + ": instance indices are not 0..N-1");
    }
    if (run.method.empty()) run.method = rows[i].method;
    run.results.push_back(std::move(rows[i].result));
  }
  if (run.method.empty()) run.method = fs::path(path).stem().string();
  return run;
}

int CmdEvaluate(const RunManifest& m, std::ostream& out) {
  if (m.results_a.empty() || m.results_b.empty()) {
    throw UsageError("evaluate needs --results-a and --results-b");
  }
  MethodRun a = ReadRun(m.results_a);
  MethodRun b = ReadRun(m.results_b);
  if (a.results.size() != b.results.size()) {
    throw UsageError("index mismatch: " + std::to_string(a.results.size()) +
                     " vs " + std::to_string(b.results.size()) + " results");
  }
  for (size_t i = 0; i < a.results.size(); ++i) {
    if (a.results[i].original != b.results[i].original) {
      throw UsageError("index mismatch: instance " + std::to_string(i) +
                       " differs between the result files");
    }
  }
  if (a.method == b.method) b.method += "_ref";
  const fs::path dir = PrepareOutDir(m);
  std::optional<PreparedData> data;
  std::string dataset_name = m.dataset_name;
  if (!m.data_schema.empty()) {
    RequireFile(m.data_schema, "data-schema");
    const DatasetSchema schema = DatasetSchema::FromFile(m.data_schema);
    data = PrepareDataset(LoadCsv(schema.csv_path, schema),
                          SplitSpec{0.7, m.seed, true});
    if (dataset_name.empty()) dataset_name = schema.name;
  }
  const Distance distance = MakeDistance(
      m.distance, data ? &data->train.features : nullptr, dir);
  const CellKey cell{dataset_name.empty() ? "dataset" : dataset_name,
                     m.model_name.empty() ? "model" : m.model_name,
                     std::string(distance.name())};
  const EvaluationReport report = ComparePair(cell, a, b, distance);
  const std::string table = RenderReportTable({&report, 1});
  WriteTextFile(dir / "report.csv", RenderReportCsv({&report, 1}));
  WriteTextFile(dir / "report.txt", table);
  WriteManifest(m, dir);
  out << table;
  return kExitOk;
}

int CmdFidelity(const RunManifest& m, std::ostream& out) {
  const Workload work = LoadWorkload(m);
  const SoftEnsembleParams params{m.sigma, m.tau};
  try {
    params.Validate();
  } catch (const ArgumentError& e) {
    throw UsageError(e.what());
  }
  const double fidelity = Fidelity(work.model, params, work.instances);
  out << "fidelity " << std::setprecision(6) << fidelity << " over "
      << work.instances.size() << " instances\n";
  if (!m.out.empty()) {
    const fs::path dir = PrepareOutDir(m);
    WriteTextFile(dir / "fidelity.json",
                  json{{"sigma", m.sigma},
                       {"tau", m.tau},
                       {"fidelity", fidelity},
                       {"n", work.instances.size()}}
                          .dump(2) + "\n");
    WriteManifest(m, dir);
  }
  return kExitOk;
}

void AddDataOptions(CLI::App* cmd, FlagValues& f) {
  cmd->add_option("--manifest", f.manifest, "Run manifest (JSON)");
  cmd->add_option("--model", f.model, "Portable model file (JSON)");
  cmd->add_option("--data-schema", f.data_schema, "Dataset schema file");
  cmd->add_option("--distance", f.distance,
                  "euclidean | cosine | manhattan | mahalanobis");
  cmd->add_option("--seed", f.seed, "Split and sampling seed");
  cmd->add_option("--workers", f.workers, "Worker threads (0 = all cores)");
  cmd->add_option("--max-instances", f.max_instances,
                  "Use at most this many test instances (0 = all)");
  cmd->add_option("--out", f.out, "Output directory");
}

void AddFocusOptions(CLI::App* cmd, FlagValues& f) {
  cmd->add_option("--sigma", f.sigma, "Sigmoid steepness");
  cmd->add_option("--tau", f.tau, "Softmax temperature");
  cmd->add_option("--beta", f.beta, "Distance weight");
  cmd->add_option("--lr", f.lr, "Adam learning rate");
  cmd->add_option("--iters", f.iters, "Adam iterations");
  cmd->add_flag("--clamp", f.clamp, "Project onto [0,1]^F after each step");
}

}  // namespace

int Run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Counterfactual explanations for tree ensembles", "treecf"};
  app.require_subcommand(1);
  FlagValues flags;

  CLI::App* generate = app.add_subcommand("generate", "Generate counterfactuals");
  AddDataOptions(generate, flags);
  AddFocusOptions(generate, flags);
  generate->add_option("--method", flags.method, "focus | ft | rp");
  generate->add_option("--epsilon", flags.epsilon, "Feature tweaking margin");
  generate->add_option("--samples", flags.samples, "Random perturbation draws");
  generate->add_option("--noise-std", flags.noise_std,
                       "Random perturbation noise standard deviation");

  CLI::App* sweep = app.add_subcommand("sweep", "Hyperparameter sweep");
  AddDataOptions(sweep, flags);
  AddFocusOptions(sweep, flags);
  sweep->add_option("--grid", flags.grid,
                    "Grid file {sigma:[..], tau:[..], beta:[..], alpha:[..]}");

  CLI::App* evaluate = app.add_subcommand("evaluate", "Compare two result files");
  evaluate->add_option("--manifest", flags.manifest, "Run manifest (JSON)");
  evaluate->add_option("--results-a", flags.results_a, "Method results");
  evaluate->add_option("--results-b", flags.results_b, "Reference results");
  evaluate->add_option("--distance", flags.distance, "Distance to compare in");
  evaluate->add_option("--data-schema", flags.data_schema,
                       "Dataset schema (needed for mahalanobis)");
  evaluate->add_option("--seed", flags.seed, "Split seed");
  evaluate->add_option("--dataset-name", flags.dataset_name, "Report label");
  evaluate->add_option("--model-name", flags.model_name, "Report label");
  evaluate->add_option("--out", flags.out, "Output directory");

  CLI::App* fidelity = app.add_subcommand("fidelity", "Soft/hard agreement");
  AddDataOptions(fidelity, flags);
  fidelity->add_option("--sigma", flags.sigma, "Sigmoid steepness");
  fidelity->add_option("--tau", flags.tau, "Softmax temperature");

  CLI::App* trace = app.add_subcommand(
      "export-fig3-trace", "Per-iteration mean distance and validity trace");
  AddDataOptions(trace, flags);
  AddFocusOptions(trace, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (generate->parsed()) {
      return CmdGenerate(Resolve("generate", flags), out, false);
    }
    if (sweep->parsed()) return CmdSweep(Resolve("sweep", flags), out);
    if (evaluate->parsed()) return CmdEvaluate(Resolve("evaluate", flags), out);
    if (fidelity->parsed()) return CmdFidelity(Resolve("fidelity", flags), out);
    RunManifest m = Resolve("export-fig3-trace", flags);
    m.method = "focus";
    return CmdGenerate(m, out, true);
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace treecf::cli
