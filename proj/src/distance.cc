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

#include "treecf/distance.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "treecf/errors.h"

namespace treecf {
namespace {

// Smallest squared Cholesky pivot, relative to the largest diagonal entry,
// accepted as positive definite. Exactly singular matrices can otherwise
// slip through with round-off sized pivots.
constexpr double kRelativePivotFloor = 1e-12;

bool IsPositiveDefinite(const Eigen::MatrixXd& matrix,
                        Eigen::LLT<Eigen::MatrixXd>& llt) {
  if (!matrix.allFinite()) return false;
  llt.compute(matrix);
  if (llt.info() != Eigen::Success) return false;
  const Eigen::VectorXd pivots = llt.matrixL().toDenseMatrix().diagonal();
  const double scale = std::max(matrix.diagonal().maxCoeff(), 0.0);
  return pivots.array().square().minCoeff() > kRelativePivotFloor * scale;
}

void CheckSameLength(std::span<const double> x, std::span<const double> x_bar) {
  if (x.size() != x_bar.size()) {
    throw ArgumentError("distance operands have lengths " +
                        std::to_string(x.size()) + " and " +
                        std::to_string(x_bar.size()));
  }
}

double Norm(std::span<const double> v) {
  double sum = 0.0;
  for (double e : v) sum += e * e;
  return std::sqrt(sum);
}

Eigen::VectorXd Difference(std::span<const double> x,
                           std::span<const double> x_bar) {
  Eigen::VectorXd v(x.size());
  for (size_t i = 0; i < x.size(); ++i) v[i] = x_bar[i] - x[i];
  return v;
}

}  // namespace

std::string_view DistanceKindName(DistanceKind kind) {
  switch (kind) {
    case DistanceKind::kEuclidean:
      return "euclidean";
    case DistanceKind::kCosine:
      return "cosine";
    case DistanceKind::kManhattan:
      return "manhattan";
    case DistanceKind::kMahalanobis:
      return "mahalanobis";
  }
  return "unknown";
}

DistanceKind ParseDistanceKind(std::string_view name) {
  if (name == "euclidean") return DistanceKind::kEuclidean;
  if (name == "cosine") return DistanceKind::kCosine;
  if (name == "manhattan") return DistanceKind::kManhattan;
  if (name == "mahalanobis") return DistanceKind::kMahalanobis;
  throw ArgumentError("unknown distance '" + std::string(name) + "'");
}

CovarianceEstimate EstimateCovariance(
    std::span<const std::vector<double>> rows) {
  if (rows.size() < 2) {
    throw ArgumentError("covariance needs at least two rows");
  }
  const size_t n = rows.size();
  const size_t f = rows[0].size();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(f);
  for (const auto& row : rows) {
    if (row.size() != f) throw ArgumentError("ragged training matrix");
    mean += Eigen::Map<const Eigen::VectorXd>(row.data(), f);
  }
  mean /= static_cast<double>(n);
  Eigen::MatrixXd covariance = Eigen::MatrixXd::Zero(f, f);
  for (const auto& row : rows) {
    const Eigen::VectorXd centered =
        Eigen::Map<const Eigen::VectorXd>(row.data(), f) - mean;
    covariance.selfadjointView<Eigen::Lower>().rankUpdate(centered);
  }
  covariance = covariance.selfadjointView<Eigen::Lower>();
  covariance /= static_cast<double>(n - 1);

  Eigen::LLT<Eigen::MatrixXd> llt;
  for (double delta : kCovarianceDeltas) {
    const Eigen::MatrixXd regularized =
        covariance + delta * Eigen::MatrixXd::Identity(f, f);
    if (IsPositiveDefinite(regularized, llt)) {
      return {std::move(covariance), delta};
    }
  }
  throw NumericError(
      "covariance is not positive definite even after regularization");
}

std::uint64_t HashRows(std::span<const std::vector<double>> rows) {
  std::uint64_t hash = 1469598103934665603ULL;
  auto mix = [&hash](const void* data, size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < size; ++i) {
      hash ^= bytes[i];
      hash *= 1099511628211ULL;
    }
  };
  for (const auto& row : rows) {
    const std::uint64_t width = row.size();
    mix(&width, sizeof(width));
    mix(row.data(), row.size() * sizeof(double));
  }
  return hash;
}

std::string CovarianceToJson(const CovarianceEstimate& estimate) {
  nlohmann::json matrix = nlohmann::json::array();
  for (Eigen::Index i = 0; i < estimate.matrix.rows(); ++i) {
    std::vector<double> row(estimate.matrix.cols());
    for (Eigen::Index j = 0; j < estimate.matrix.cols(); ++j) {
      row[j] = estimate.matrix(i, j);
    }
    matrix.push_back(row);
  }
  return nlohmann::json{{"F", estimate.matrix.rows()},
                        {"delta", estimate.delta},
                        {"matrix", matrix}}
      .dump();
}

CovarianceEstimate CovarianceFromJson(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    const int f = j.at("F").get<int>();
    const auto rows = j.at("matrix").get<std::vector<std::vector<double>>>();
    if (static_cast<int>(rows.size()) != f) {
      throw LoadError("covariance: matrix has wrong row count");
    }
    CovarianceEstimate estimate;
    estimate.delta = j.at("delta").get<double>();
    estimate.matrix.resize(f, f);
    for (int i = 0; i < f; ++i) {
      if (static_cast<int>(rows[i].size()) != f) {
        throw LoadError("covariance: matrix has wrong column count");
      }
      for (int k = 0; k < f; ++k) estimate.matrix(i, k) = rows[i][k];
    }
    return estimate;
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("covariance: ") + e.what());
  }
}

CovarianceEstimate CachedCovariance(std::span<const std::vector<double>> rows,
                                    const std::filesystem::path& dir) {
  std::ostringstream name;
  name << "covariance_" << std::hex << HashRows(rows) << ".json";
  const std::filesystem::path path = dir / name.str();
  if (std::ifstream in(path); in) {
    std::stringstream buffer;
    buffer << in.rdbuf();
    return CovarianceFromJson(buffer.str());
  }
  CovarianceEstimate estimate = EstimateCovariance(rows);
  std::filesystem::create_directories(dir);
  std::ofstream(path) << CovarianceToJson(estimate) << '\n';
  return estimate;
}

Distance Distance::Euclidean() { return Distance(DistanceKind::kEuclidean); }
Distance Distance::Cosine() { return Distance(DistanceKind::kCosine); }
Distance Distance::Manhattan() { return Distance(DistanceKind::kManhattan); }

Distance Distance::Mahalanobis(const CovarianceEstimate& covariance) {
  const auto f = covariance.matrix.rows();
  if (covariance.matrix.cols() != f || f == 0) {
    throw ArgumentError("covariance matrix must be square and non-empty");
  }
  auto llt = std::make_shared<Eigen::LLT<Eigen::MatrixXd>>();
  const Eigen::MatrixXd regularized =
      covariance.matrix + covariance.delta * Eigen::MatrixXd::Identity(f, f);
  if (!IsPositiveDefinite(regularized, *llt)) {
    throw NumericError("covariance matrix is not positive definite");
  }
  Distance distance(DistanceKind::kMahalanobis);
  distance.cholesky_ = std::move(llt);
  return distance;
}

Distance Distance::FromKind(DistanceKind kind) {
  if (kind == DistanceKind::kMahalanobis) {
    throw ArgumentError("mahalanobis distance needs a covariance estimate");
  }
  return Distance(kind);
}

double Distance::operator()(std::span<const double> x,
                            std::span<const double> x_bar) const {
  CheckSameLength(x, x_bar);
  switch (kind_) {
    case DistanceKind::kEuclidean: {
      double sum = 0.0;
      for (size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - x_bar[i];
        sum += d * d;
      }
      return std::sqrt(sum);
    }
    case DistanceKind::kManhattan: {
      double sum = 0.0;
      for (size_t i = 0; i < x.size(); ++i) sum += std::abs(x[i] - x_bar[i]);
      return sum;
    }
    case DistanceKind::kCosine: {
      const double norm_x = Norm(x);
      const double norm_bar = Norm(x_bar);
      if (norm_x == 0.0 || norm_bar == 0.0) {
        throw ArgumentError("cosine distance is undefined for a zero vector");
      }
      double dot = 0.0;
      for (size_t i = 0; i < x.size(); ++i) dot += x[i] * x_bar[i];
      return std::max(0.0, 1.0 - dot / (norm_x * norm_bar));
    }
    case DistanceKind::kMahalanobis: {
      if (static_cast<Eigen::Index>(x.size()) != cholesky_->rows()) {
        throw ArgumentError("instance width does not match the covariance");
      }
      const Eigen::VectorXd w =
          cholesky_->matrixL().solve(Difference(x, x_bar));
      return w.norm();
    }
  }
  return 0.0;
}

void Distance::AccumulateGradient(std::span<const double> x,
                                  std::span<const double> x_bar, double scale,
                                  std::span<double> gradient) const {
  CheckSameLength(x, x_bar);
  switch (kind_) {
    case DistanceKind::kEuclidean: {
      const double d = (*this)(x, x_bar);
      if (d == 0.0) return;
      for (size_t i = 0; i < x.size(); ++i) {
        gradient[i] += scale * (x_bar[i] - x[i]) / d;
      }
      return;
    }
    case DistanceKind::kManhattan: {
      for (size_t i = 0; i < x.size(); ++i) {
        if (x_bar[i] > x[i]) {
          gradient[i] += scale;
        } else if (x_bar[i] < x[i]) {
          gradient[i] -= scale;
        }
      }
      return;
    }
    case DistanceKind::kCosine: {
      const double norm_x = Norm(x);
      const double norm_bar = Norm(x_bar);
      if (norm_x == 0.0 || norm_bar == 0.0) {
        throw ArgumentError("cosine distance is undefined for a zero vector");
      }
      double dot = 0.0;
      for (size_t i = 0; i < x.size(); ++i) dot += x[i] * x_bar[i];
      const double inv = 1.0 / (norm_x * norm_bar);
      const double proj = dot / (norm_bar * norm_bar);
      // d/dx_bar [1 - x.x_bar / (|x||x_bar|)].
      for (size_t i = 0; i < x.size(); ++i) {
        gradient[i] -= scale * inv * (x[i] - proj * x_bar[i]);
      }
      return;
    }
    case DistanceKind::kMahalanobis: {
      const Eigen::VectorXd v = Difference(x, x_bar);
      const Eigen::VectorXd w = cholesky_->matrixL().solve(v);
      const double d = w.norm();
      if (d == 0.0) return;
      const Eigen::VectorXd u = cholesky_->matrixU().solve(w);  // C^-1 v.
      for (size_t i = 0; i < x.size(); ++i) gradient[i] += scale * u[i] / d;
      return;
    }
  }
}

std::vector<double> Distance::Gradient(std::span<const double> x,
                                       std::span<const double> x_bar) const {
  std::vector<double> gradient(x.size(), 0.0);
  AccumulateGradient(x, x_bar, 1.0, gradient);
  return gradient;
}

}  // namespace treecf
