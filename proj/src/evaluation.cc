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

#include "treecf/evaluation.h"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "treecf/errors.h"

namespace treecf {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void CheckPaired(size_t a, size_t b) {
  if (a != b) {
    throw ArgumentError("result sets are not paired: " + std::to_string(a) +
                        " vs " + std::to_string(b));
  }
}

std::string FormatNumber(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream out;
  out << std::setprecision(10) << v;
  return out.str();
}

std::string MarkerSymbol(Significance marker) {
  switch (marker) {
    case Significance::kImprovement:
      return "v";
    case Significance::kLoss:
      return "^";
    case Significance::kNone:
      return "o";
  }
  return "";
}

}  // namespace

double MeanDistance(std::span<const std::vector<double>> originals,
                    std::span<const std::vector<double>> counterfactuals,
                    const Distance& distance) {
  CheckPaired(originals.size(), counterfactuals.size());
  if (originals.empty()) throw ArgumentError("mean distance of an empty set");
  double sum = 0.0;
  for (size_t n = 0; n < originals.size(); ++n) {
    sum += distance(originals[n], counterfactuals[n]);
  }
  return sum / static_cast<double>(originals.size());
}

RelativeDistance MeanRelativeDistance(
    std::span<const std::vector<double>> originals,
    std::span<const std::vector<double>> counterfactuals,
    std::span<const std::vector<double>> reference,
    const Distance& distance) {
  CheckPaired(originals.size(), counterfactuals.size());
  CheckPaired(originals.size(), reference.size());
  RelativeDistance result;
  double sum = 0.0;
  for (size_t n = 0; n < originals.size(); ++n) {
    const double d_ref = distance(originals[n], reference[n]);
    if (d_ref == 0.0) {
      ++result.n_excluded;
      continue;
    }
    sum += distance(originals[n], counterfactuals[n]) / d_ref;
    ++result.n_used;
  }
  result.value = result.n_used == 0 ? kNaN : sum / result.n_used;
  return result;
}

double PctCloser(std::span<const std::vector<double>> originals,
                 std::span<const std::vector<double>> counterfactuals,
                 std::span<const std::vector<double>> reference,
                 const Distance& distance) {
  CheckPaired(originals.size(), counterfactuals.size());
  CheckPaired(originals.size(), reference.size());
  if (originals.empty()) return 0.0;
  size_t closer = 0;
  for (size_t n = 0; n < originals.size(); ++n) {
    if (distance(originals[n], counterfactuals[n]) <
        distance(originals[n], reference[n])) {
      ++closer;
    }
  }
  return static_cast<double>(closer) / static_cast<double>(originals.size());
}

std::string_view SignificanceName(Significance marker) {
  switch (marker) {
    case Significance::kImprovement:
      return "improvement";
    case Significance::kLoss:
      return "loss";
    case Significance::kNone:
      return "none";
  }
  return "none";
}

EvaluationReport ComparePair(const CellKey& cell, const MethodRun& method,
                             const MethodRun& reference,
                             const Distance& distance,
                             std::optional<double> fidelity) {
  CheckPaired(method.results.size(), reference.results.size());
  EvaluationReport report;
  report.cell = cell;
  report.method = method.method;
  report.reference = reference.method;
  report.n_total = method.results.size();
  report.fidelity = fidelity;

  Rows originals, ours, theirs;
  std::vector<double> d_ours, d_theirs;
  for (size_t n = 0; n < report.n_total; ++n) {
    const CounterfactualResult& a = method.results[n];
    const CounterfactualResult& b = reference.results[n];
    if (a.original != b.original) {
      throw ArgumentError("result sets differ at instance " +
                          std::to_string(n));
    }
    report.n_valid_method += a.valid;
    report.n_valid_reference += b.valid;
    if (!(a.valid && b.valid)) continue;
    originals.push_back(a.original);
    ours.push_back(a.counterfactual);
    theirs.push_back(b.counterfactual);
    d_ours.push_back(distance(a.original, a.counterfactual));
    d_theirs.push_back(distance(b.original, b.counterfactual));
  }
  report.n_compared = originals.size();
  if (report.n_compared == 0) {
    report.d_mean_method = report.d_mean_reference = kNaN;
    report.d_rmean.value = kNaN;
    report.t_test = {kNaN, kNaN, kNaN};
    return report;
  }
  report.d_mean_method = MeanDistance(originals, ours, distance);
  report.d_mean_reference = MeanDistance(originals, theirs, distance);
  report.d_rmean = MeanRelativeDistance(originals, ours, theirs, distance);
  report.pct_closer = PctCloser(originals, ours, theirs, distance);
  if (report.n_compared >= 2) {
    report.t_test = WelchTTest(d_ours, d_theirs);
    if (report.t_test.p < kSignificanceLevel) {
      report.marker = report.d_mean_method < report.d_mean_reference
                          ? Significance::kImprovement
                          : Significance::kLoss;
    }
  } else {
    report.t_test = {kNaN, kNaN, kNaN};
  }
  return report;
}

std::string RenderReportCsv(std::span<const EvaluationReport> reports) {
  std::ostringstream out;
  const std::string ref = reports.empty() ? "ref" : reports[0].reference;
  out << "dataset,model,distance,method,d_mean,d_Rmean_vs_" << ref
      << ",pct_closer_vs_" << ref
      << ",n_valid,n_compared,p_value,marker\n";
  for (const EvaluationReport& r : reports) {
    if (r.reference != ref) {
      throw ArgumentError("reports compare against different references");
    }
    const std::string prefix =
        r.cell.dataset + "," + r.cell.model + "," + r.cell.distance + ",";
    out << prefix << r.method << "," << FormatNumber(r.d_mean_method) << ","
        << FormatNumber(r.d_rmean.value) << "," << FormatNumber(r.pct_closer)
        << "," << r.n_valid_method << "," << r.n_compared << ","
        << FormatNumber(r.t_test.p) << "," << SignificanceName(r.marker)
        << "\n";
    const bool any = r.n_compared > 0;
    out << prefix << r.reference << "," << FormatNumber(r.d_mean_reference)
        << "," << (any ? "1" : "nan") << ",0," << r.n_valid_reference << ","
        << r.n_compared << "," << (any ? "1" : "nan") << ",none\n";
  }
  return out.str();
}

std::string RenderReportTable(std::span<const EvaluationReport> reports) {
  std::ostringstream out;
  out << std::fixed;
  for (const EvaluationReport& r : reports) {
    out << r.cell.dataset << " / " << r.cell.model << " / " << r.cell.distance
        << "  (compared " << r.n_compared << " of " << r.n_total << "; valid "
        << r.method << " " << r.n_valid_method << ", " << r.reference << " "
        << r.n_valid_reference << ")\n";
    const int w = 12;
    out << "  " << std::left << std::setw(w) << "metric" << std::setw(w)
        << "method" << std::right << std::setw(w) << "value" << "\n";
    out << "  " << std::left << std::setw(w) << "d_mean" << std::setw(w)
        << r.method << std::right << std::setw(w) << std::setprecision(4)
        << r.d_mean_method << " " << MarkerSymbol(r.marker) << "\n";
    out << "  " << std::left << std::setw(w) << "" << std::setw(w)
        << r.reference << std::right << std::setw(w) << r.d_mean_reference
        << "\n";
    out << "  " << std::left << std::setw(w) << "d_Rmean" << std::setw(w)
        << r.method << std::right << std::setw(w) << r.d_rmean.value << "\n";
    out << "  " << std::left << std::setw(w) << "%closer" << std::setw(w)
        << r.method << std::right << std::setw(w) << std::setprecision(1)
        << 100.0 * r.pct_closer << "%\n";
    out << "  " << std::left << std::setw(w) << "p_value" << std::setw(w) << ""
        << std::right << std::setw(w) << std::scientific
        << std::setprecision(2) << r.t_test.p << std::fixed << "\n";
    if (r.fidelity.has_value()) {
      out << "  " << std::left << std::setw(w) << "fidelity" << std::setw(w)
          << r.method << std::right << std::setw(w) << std::setprecision(3)
          << *r.fidelity << "\n";
    }
  }
  out << "markers: v significant improvement, ^ significant loss, o no "
         "significant difference (p < 0.05, two-tailed Welch t-test)\n";
  return out.str();
}

}  // namespace treecf
