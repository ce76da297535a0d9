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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails. Every tolerance and experiment size is
// pinned below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "support/fixtures.h"
#include "support/trainer.h"
#include "treecf/baselines.h"
#include "treecf/dataio.h"
#include "treecf/distance.h"
#include "treecf/evaluation.h"
#include "treecf/focus.h"
#include "treecf/soft_model.h"
#include "treecf/stats.h"

namespace treecf {
namespace {

using Clock = std::chrono::steady_clock;

// Soft-approximation limit.
constexpr int kLimitEnsembles = 50;
constexpr int kLimitPointsPerEnsemble = 200;
constexpr int kLimitMaxTrees = 5;
constexpr int kLimitMaxDepth = 4;
constexpr double kLimitSharpness = 1e4;
// A point is off-threshold when every split feature is at least this far
// from its threshold.
constexpr double kOffThresholdMargin = 0.01;
constexpr double kLimitSecondsBudget = 10.0;

// Leaf partition.
constexpr int kPartitionPairs = 10000;
constexpr double kPartitionTolerance = 1e-9;

// Gradient check.
constexpr int kGradientConfigsPerDistance = 100;
constexpr double kGradientStep = 1e-5;
constexpr double kGradientMaxRelativeError = 1e-4;
// Components smaller than this in both the analytic and the numeric value
// are dominated by finite-difference round-off and are not compared.
constexpr double kGradientComparisonFloor = 1e-6;

// Desk-scale experiments.
constexpr int kRowsPerDataset = 1000;
constexpr int kMaxTestInstances = 100;
constexpr int kForestTrees = 50;
constexpr int kBoostingStages = 50;
constexpr int kTreeDepth = 4;
constexpr int kFocusIterations = 1000;
constexpr double kSettingSecondsBudget = 600.0;
constexpr double kSignificance = 0.05;
constexpr int kTraceSettings = 2;

// Distances and evaluation.
constexpr int kDistancePairs = 10000;
constexpr double kMahalanobisIdentityTolerance = 1e-12;
constexpr double kEvaluationTolerance = 1e-12;

// Known boundary.
constexpr double kBoundaryGap = 0.1;
constexpr double kBoundarySlack = 0.01;

int g_failures = 0;

void Report(const std::string& id, bool pass, const std::string& detail) {
  std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", id.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string Format(const char* fmt, auto... args) {
  char buffer[512];
  std::snprintf(buffer, sizeof(buffer), fmt, args...);
  return buffer;
}

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

testing::RandomTreeSpec SpecFor(std::mt19937_64& rng) {
  testing::RandomTreeSpec spec;
  spec.n_features = std::uniform_int_distribution<int>(1, 6)(rng);
  spec.n_classes = std::uniform_int_distribution<int>(2, 4)(rng);
  spec.max_depth = std::uniform_int_distribution<int>(1, kLimitMaxDepth)(rng);
  return spec;
}

void SoftApproximationLimit() {
  const auto start = Clock::now();
  std::mt19937_64 rng(1001);
  size_t agree = 0, total = 0;
  for (int e = 0; e < kLimitEnsembles; ++e) {
    const testing::RandomTreeSpec spec = SpecFor(rng);
    const int n_trees =
        std::uniform_int_distribution<int>(1, kLimitMaxTrees)(rng);
    const TreeEnsemble model = testing::RandomEnsemble(rng, spec, n_trees);
    Rows points;
    while (static_cast<int>(points.size()) < kLimitPointsPerEnsemble) {
      auto x = testing::RandomPoint(rng, spec.n_features);
      if (testing::OffThreshold(model, x, kOffThresholdMargin)) {
        points.push_back(std::move(x));
      }
    }
    const double fidelity =
        Fidelity(model, {kLimitSharpness, kLimitSharpness}, points);
    agree += static_cast<size_t>(std::lround(fidelity * points.size()));
    total += points.size();
  }
  const double seconds = Seconds(start);
  const double fidelity = static_cast<double>(agree) / total;
  Report("soft-approximation-limit",
         fidelity == 1.0 && seconds < kLimitSecondsBudget,
         Format("fidelity %.6f over %zu points, %.2f s", fidelity, total,
                seconds));
}

void LeafPartition() {
  std::mt19937_64 rng(1002);
  std::uniform_real_distribution<double> log_sigma(-2.0, 4.0);
  double worst = 0.0;
  for (int n = 0; n < kPartitionPairs; ++n) {
    const DecisionTree tree = testing::RandomTree(rng, SpecFor(rng));
    const int width = std::max(1, tree.MaxFeatureIndex() + 1);
    const auto x = testing::RandomPoint(rng, width);
    const auto activation =
        SoftNodeActivations(tree, x, std::pow(10.0, log_sigma(rng)));
    double sum = 0.0;
    for (int i = 0; i < tree.size(); ++i) {
      if (tree.at(i).is_leaf()) sum += activation[i];
    }
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  Report("leaf-partition", worst <= kPartitionTolerance,
         Format("max |sum - 1| = %.3g over %d pairs", worst, kPartitionPairs));
}

Distance RandomMahalanobis(std::mt19937_64& rng, int f) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd a(f, f);
  for (int i = 0; i < f; ++i) {
    for (int j = 0; j < f; ++j) a(i, j) = normal(rng);
  }
  return Distance::Mahalanobis(
      {a * a.transpose() / f + 0.2 * Eigen::MatrixXd::Identity(f, f), 0.0});
}

// The hard label is constant on the stencil and, for Manhattan, no
// coordinate of x_bar sits within the stencil of the matching x.
bool SmoothAt(const TreeEnsemble& model, const Distance& distance,
              std::span<const double> x, std::span<const double> x_bar) {
  const int label = PredictLabel(model, x_bar);
  std::vector<double> probe(x_bar.begin(), x_bar.end());
  for (size_t i = 0; i < probe.size(); ++i) {
    if (distance.kind() == DistanceKind::kManhattan &&
        std::abs(x_bar[i] - x[i]) <= 2 * kGradientStep) {
      return false;
    }
    for (double s : {-2 * kGradientStep, 2 * kGradientStep}) {
      probe[i] = x_bar[i] + s;
      if (PredictLabel(model, probe) != label) return false;
    }
    probe[i] = x_bar[i];
  }
  return true;
}

void GradientCorrectness() {
  std::mt19937_64 rng(1003);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  bool pass = true;
  std::string detail;
  for (DistanceKind kind :
       {DistanceKind::kEuclidean, DistanceKind::kCosine,
        DistanceKind::kManhattan, DistanceKind::kMahalanobis}) {
    double worst = 0.0;
    size_t compared = 0;
    int configs = 0;
    while (configs < kGradientConfigsPerDistance) {
      testing::RandomTreeSpec spec = SpecFor(rng);
      spec.n_features = std::max(2, spec.n_features);
      const TreeEnsemble model = testing::RandomEnsemble(
          rng, spec, std::uniform_int_distribution<int>(1, 5)(rng));
      FocusConfig config;
      config.params = {std::pow(10.0, 2.0 * unit(rng)),
                       std::pow(10.0, unit(rng) - 0.3)};
      config.beta = std::pow(10.0, 2.0 * unit(rng) - 2.0);
      config.distance = kind == DistanceKind::kMahalanobis
                            ? RandomMahalanobis(rng, spec.n_features)
                            : Distance::FromKind(kind);
      const auto x = testing::RandomPoint(rng, spec.n_features);
      // Half the points keep the original label, so both branches of the
      // gate are exercised.
      std::vector<double> x_bar = x;
      for (double& v : x_bar) v += 0.3 * (unit(rng) - 0.5);
      if (!SmoothAt(model, config.distance, x, x_bar)) continue;
      ++configs;
      const auto g = TotalLossGradient(model, config, x, x_bar);
      for (size_t i = 0; i < x_bar.size(); ++i) {
        auto up = x_bar, down = x_bar;
        up[i] += kGradientStep;
        down[i] -= kGradientStep;
        const double fd = (TotalLoss(model, config, x, up) -
                           TotalLoss(model, config, x, down)) /
                          (2 * kGradientStep);
        const double scale = std::max(std::abs(fd), std::abs(g[i]));
        if (scale < kGradientComparisonFloor) continue;
        ++compared;
        worst = std::max(worst, std::abs(g[i] - fd) / scale);
      }
    }
    pass = pass && worst < kGradientMaxRelativeError;
    detail += Format("%s max rel err %.2e (%zu comps); ",
                     std::string(DistanceKindName(kind)).c_str(), worst,
                     compared);
  }
  Report("gradient-correctness", pass, detail);
}

struct DeskDataset {
  std::string name;
  int n_features;
  std::uint64_t seed;
};

struct SettingOutcome {
  std::string label;
  bool complete = false;
  double validity_pct = 0.0;
  double pct_closer = 0.0;
  double p_value = 1.0;
  double d_focus = 0.0;
  double d_rp = 0.0;
  size_t n_compared = 0;
  size_t n_total = 0;
  double seconds = 0.0;
  FocusConfig best;
};

// Sigma, tau and learning rate are subsets of SweepGrid::Default(). The beta
// axis extends the default one with 1.
SweepGrid AcceptanceGrid() {
  return {{1.0, 10.0}, {1.0}, {0.01, 0.1, 1.0}, {0.001, 0.01, 0.1}};
}

struct DeskResults {
  std::vector<SettingOutcome> settings;
  // Inputs kept for the trace criterion.
  std::vector<TreeEnsemble> models;
  std::vector<Rows> instances;
};

DeskResults RunDeskExperiments() {
  const std::vector<DeskDataset> datasets = {{"synth_f11", 11, 11},
                                             {"synth_f23", 23, 23},
                                             {"synth_f6", 6, 6},
                                             {"synth_f9", 9, 9}};
  const auto dir = testing::TempDir("acceptance");
  DeskResults out;
  for (const DeskDataset& spec : datasets) {
    const auto schema_path = testing::WriteSyntheticDataset(
        dir, spec.name, spec.n_features, kRowsPerDataset, spec.seed);
    const DatasetSchema schema = DatasetSchema::FromFile(schema_path);
    const PreparedData data =
        PrepareDataset(LoadCsv(schema.csv_path, schema), {0.7, 0, true});
    Rows instances = data.test.features;
    if (static_cast<int>(instances.size()) > kMaxTestInstances) {
      instances.resize(kMaxTestInstances);
    }
    const std::vector<std::pair<std::string, TreeEnsemble>> models = {
        {"dt", testing::TrainDecisionTree(data.train, kTreeDepth)},
        {"rf", testing::TrainRandomForest(data.train, kForestTrees,
                                          kTreeDepth, spec.seed)},
        {"ab", testing::TrainAdaBoost(data.train, kBoostingStages, kTreeDepth,
                                      spec.seed)}};
    const CovarianceEstimate covariance =
        EstimateCovariance(data.train.features);
    for (const auto& [model_name, model] : models) {
      std::fprintf(stderr, "# %s/%s: %zu trees, test accuracy %.3f\n",
                   spec.name.c_str(), model_name.c_str(), model.trees().size(),
                   testing::Accuracy(model, data.test));
      for (const Distance& distance :
           {Distance::Euclidean(), Distance::Cosine(), Distance::Manhattan(),
            Distance::Mahalanobis(covariance)}) {
        const auto start = Clock::now();
        SettingOutcome setting;
        setting.label = spec.name + "/" + model_name + "/" +
                        std::string(distance.name());
        FocusConfig base;
        base.distance = distance;
        base.iterations = kFocusIterations;
        const SweepOutcome sweep = SweepHyperparameters(
            model, AcceptanceGrid(), instances, base, 0);
        setting.complete = sweep.complete;
        setting.validity_pct = sweep.best().validity_pct();
        setting.best = sweep.best().config;
        const auto rp = RpGenerateAll(model, {1000, 0.5, 0}, instances,
                                      distance, 0);
        const EvaluationReport report =
            ComparePair({spec.name, model_name, std::string(distance.name())},
                        {"focus", sweep.best_results}, {"rp", rp}, distance);
        setting.pct_closer = report.pct_closer;
        setting.p_value = report.t_test.p;
        setting.d_focus = report.d_mean_method;
        setting.d_rp = report.d_mean_reference;
        setting.n_compared = report.n_compared;
        setting.n_total = report.n_total;
        setting.seconds = Seconds(start);
        std::fprintf(stderr,
                     "#   %-34s valid %5.1f%% sigma %g tau %g beta %g lr %g | "
                     "focus %.4f rp %.4f closer %.3f p %.2e (%zu/%zu) %.1fs\n",
                     setting.label.c_str(), setting.validity_pct,
                     setting.best.params.sigma, setting.best.params.tau,
                     setting.best.beta, setting.best.learning_rate,
                     setting.d_focus, setting.d_rp, setting.pct_closer,
                     setting.p_value, setting.n_compared, setting.n_total,
                     setting.seconds);
        out.settings.push_back(setting);
        out.models.push_back(model);
        out.instances.push_back(instances);
      }
    }
  }
  return out;
}

void ValidityCompleteness(const DeskResults& desk) {
  size_t complete = 0;
  double slowest = 0.0;
  std::string missing;
  for (const auto& s : desk.settings) {
    complete += s.complete;
    slowest = std::max(slowest, s.seconds);
    if (!s.complete) missing += " " + s.label;
  }
  Report("validity-completeness",
         complete == desk.settings.size() && slowest < kSettingSecondsBudget,
         Format("%zu/%zu settings fully valid, slowest setting %.1f s%s",
                complete, desk.settings.size(), slowest,
                missing.empty() ? "" : (";" + missing).c_str()));
}

void FocusDominatesRandomPerturbation(const DeskResults& desk) {
  size_t dominated = 0;
  double min_closer = 1.0, max_p = 0.0;
  std::string misses;
  for (const auto& s : desk.settings) {
    const bool ok = s.n_compared == s.n_total && s.pct_closer == 1.0 &&
                    s.p_value < kSignificance && s.d_focus < s.d_rp;
    dominated += ok;
    min_closer = std::min(min_closer, s.pct_closer);
    max_p = std::max(max_p, s.p_value);
    if (!ok) misses += " " + s.label;
  }
  Report("focus-vs-rp-dominance", dominated == desk.settings.size(),
         Format("%zu/%zu settings with pct_closer = 1 and p < %.2f; min "
                "pct_closer %.3f, max p %.2e%s",
                dominated, desk.settings.size(), kSignificance, min_closer,
                max_p, misses.empty() ? "" : (";" + misses).c_str()));
}

void FeatureTweakingFailureMode() {
  const TreeEnsemble fixture = testing::ThreeTreeFixture();
  Rows negatives;
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      negatives.push_back({0.02 + 0.045 * i, 0.02 + 0.045 * j});
    }
  }
  const FtSelection ft = FtSelectEpsilon(fixture, FtConfig::DefaultEpsilonGrid(),
                                         negatives, Distance::Euclidean(), 0);
  FocusConfig config;
  config.params = {10.0, 1.0};
  config.beta = 0.001;
  config.learning_rate = 0.01;
  config.iterations = kFocusIterations;
  const auto focus = GenerateCounterfactuals(fixture, config, negatives, 0);
  size_t ft_valid = 0, focus_valid = 0;
  for (size_t i = 0; i < negatives.size(); ++i) {
    ft_valid += ft.results[i].valid;
    focus_valid += focus[i].valid &&
                   FlipsPrediction(fixture, negatives[i], focus[i].counterfactual);
  }
  Report("ft-failure-mode",
         ft_valid < negatives.size() && focus_valid == negatives.size(),
         Format("FT valid %zu/%zu (epsilon %g), FOCUS valid %zu/%zu", ft_valid,
                negatives.size(), ft.epsilon, focus_valid, negatives.size()));
}

void TraceShape(const DeskResults& desk) {
  // The first manhattan setting of the forest and the boosted model.
  std::vector<size_t> picks;
  for (size_t i = 0; i < desk.settings.size() &&
                     static_cast<int>(picks.size()) < kTraceSettings;
       ++i) {
    const std::string& label = desk.settings[i].label;
    const bool forest = label.find("/rf/manhattan") != std::string::npos;
    const bool boost = label.find("/ab/manhattan") != std::string::npos;
    if ((forest && picks.empty()) || (boost && picks.size() == 1)) {
      picks.push_back(i);
    }
  }
  bool pass = picks.size() == static_cast<size_t>(kTraceSettings);
  std::string detail;
  for (size_t i : picks) {
    std::vector<IterationTrace> traces;
    GenerateCounterfactuals(desk.models[i], desk.settings[i].best,
                            desk.instances[i], 0, &traces);
    const auto points = AggregateTraces(traces);
    size_t peak = 0;
    for (size_t t = 1; t < points.size(); ++t) {
      if (points[t].mean_distance > points[peak].mean_distance) peak = t;
    }
    size_t all_valid = points.size();
    for (size_t t = 0; t < points.size(); ++t) {
      if (points[t].cumulative_validity == 1.0) {
        all_valid = t;
        break;
      }
    }
    const bool ok = all_valid < points.size() && peak <= all_valid &&
                    points.back().mean_distance <= points[peak].mean_distance;
    pass = pass && ok;
    detail += Format("%s peak %.4f at iter %zu, all valid at iter %zu, final "
                     "%.4f; ",
                     desk.settings[i].label.c_str(),
                     points[peak].mean_distance, peak + 1, all_valid + 1,
                     points.back().mean_distance);
  }
  Report("trace-shape", pass, detail);
}

void DistanceProperties() {
  std::mt19937_64 rng(1004);
  double worst_identity = 0.0;
  for (int n = 0; n < kDistancePairs; ++n) {
    const int f = 1 + n % 12;
    const Distance m = Distance::Mahalanobis(
        {Eigen::MatrixXd::Identity(f, f), 0.0});
    const auto x = testing::RandomPoint(rng, f);
    const auto y = testing::RandomPoint(rng, f);
    worst_identity =
        std::max(worst_identity, std::abs(m(x, y) - Distance::Euclidean()(x, y)));
  }
  size_t violations = 0, checks = 0;
  for (int n = 0; n < 2000; ++n) {
    const int f = 1 + n % 8;
    for (const Distance& d :
         {Distance::Euclidean(), Distance::Cosine(), Distance::Manhattan(),
          RandomMahalanobis(rng, f)}) {
      const auto x = testing::RandomPoint(rng, f);
      const auto y = testing::RandomPoint(rng, f);
      checks += 3;
      violations += !(d(x, y) >= 0.0);
      violations += std::abs(d(x, y) - d(y, x)) > 1e-12;
      violations += d(x, x) > 1e-12;
    }
  }
  Report("distance-properties",
         worst_identity <= kMahalanobisIdentityTolerance && violations == 0,
         Format("max |mahalanobis(I) - euclidean| %.2e over %d pairs; %zu/%zu "
                "axiom checks violated",
                worst_identity, kDistancePairs, violations, checks));
}

void KnownBoundary() {
  const TreeEnsemble stump = testing::Stump(0.5);
  FocusConfig config;
  config.params = {100.0, 1.0};
  config.beta = 0.001;
  config.learning_rate = 0.001;
  config.iterations = kFocusIterations;
  const std::vector<double> x{0.4};
  const CounterfactualResult r = GenerateCounterfactual(stump, config, x);
  const bool pass = r.valid && r.counterfactual[0] > 0.5 &&
                    r.best_distance > kBoundaryGap &&
                    r.best_distance <= kBoundaryGap + kBoundarySlack;
  Report("known-boundary", pass,
         Format("valid %d, x_cf %.6f, distance %.6f (sigma 100)", r.valid,
                r.counterfactual[0], r.best_distance));
}

void EvaluationOracle() {
  std::mt19937_64 rng(1005);
  std::bernoulli_distribution coin(0.85);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + trial % 40, f = 1 + trial % 7;
    MethodRun a{"a", {}}, b{"b", {}};
    for (int i = 0; i < n; ++i) {
      const auto x = testing::RandomPoint(rng, f);
      for (MethodRun* run : {&a, &b}) {
        CounterfactualResult r = InvalidResult(x, 0);
        if (coin(rng)) {
          r.valid = true;
          r.counterfactual = testing::RandomPoint(rng, f);
        }
        run->results.push_back(r);
      }
    }
    const Distance d = Distance::Manhattan();
    const EvaluationReport report = ComparePair({}, a, b, d);
    double sa = 0, sb = 0, ratio = 0;
    size_t both = 0, closer = 0;
    for (int i = 0; i < n; ++i) {
      if (!a.results[i].valid || !b.results[i].valid) continue;
      double da = 0, db = 0;
      for (int k = 0; k < f; ++k) {
        da += std::abs(a.results[i].counterfactual[k] - a.results[i].original[k]);
        db += std::abs(b.results[i].counterfactual[k] - b.results[i].original[k]);
      }
      ++both;
      sa += da;
      sb += db;
      ratio += da / db;
      closer += da < db;
    }
    if (both == 0) continue;
    if (report.n_compared != both) worst = INFINITY;
    worst = std::max({worst, std::abs(report.d_mean_method - sa / both),
                      std::abs(report.d_mean_reference - sb / both),
                      std::abs(report.d_rmean.value - ratio / both),
                      std::abs(report.pct_closer -
                               static_cast<double>(closer) / both)});
  }
  const std::vector<double> sample{0.3, 0.1, 0.7, 0.2, 0.9};
  const TTestResult same = WelchTTest(sample, sample);
  Report("evaluation-oracle",
         worst <= kEvaluationTolerance && same.t == 0.0 && same.p == 1.0,
         Format("max deviation %.2e; identical samples t %g p %g", worst,
                same.t, same.p));
}

}  // namespace
}  // namespace treecf

int main() {
  using namespace treecf;
  SoftApproximationLimit();
  LeafPartition();
  GradientCorrectness();
  const DeskResults desk = RunDeskExperiments();
  ValidityCompleteness(desk);
  FocusDominatesRandomPerturbation(desk);
  FeatureTweakingFailureMode();
  TraceShape(desk);
  DistanceProperties();
  KnownBoundary();
  EvaluationOracle();
  std::printf("%d criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
