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

#ifndef TREECF_DISTANCE_H_
#define TREECF_DISTANCE_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace treecf {

enum class DistanceKind { kEuclidean, kCosine, kManhattan, kMahalanobis };

std::string_view DistanceKindName(DistanceKind kind);
// Accepts "euclidean", "cosine", "manhattan", "mahalanobis".
DistanceKind ParseDistanceKind(std::string_view name);

// Sample covariance of a training matrix plus the diagonal regularization
// that had to be added for a Cholesky factorization to succeed.
struct CovarianceEstimate {
  Eigen::MatrixXd matrix;  // Unregularized, divisor N - 1.
  double delta = 0.0;      // Mahalanobis uses matrix + delta * I.
};

// Candidate regularizations, tried in order.
inline constexpr double kCovarianceDeltas[] = {0.0, 1e-8, 1e-6, 1e-4};

// Throws ArgumentError for fewer than two rows or ragged rows, and
// NumericError if no candidate delta yields a positive definite matrix.
CovarianceEstimate EstimateCovariance(
    std::span<const std::vector<double>> rows);

// Order-sensitive FNV-1a hash of the raw row bytes; keys covariance caches.
std::uint64_t HashRows(std::span<const std::vector<double>> rows);

// Sidecar format: {"F": n, "delta": d, "matrix": [[...], ...]}.
std::string CovarianceToJson(const CovarianceEstimate& estimate);
CovarianceEstimate CovarianceFromJson(std::string_view text);

// Loads <dir>/covariance_<hash>.json when present; otherwise estimates and
// writes it.
CovarianceEstimate CachedCovariance(std::span<const std::vector<double>> rows,
                                    const std::filesystem::path& dir);

// A distance d(x, x_bar) with its gradient with respect to x_bar. Cheap to
// copy; the Mahalanobis factor is shared.
class Distance {
 public:
  static Distance Euclidean();
  static Distance Cosine();
  static Distance Manhattan();
  // Throws NumericError if matrix + delta * I is not positive definite.
  static Distance Mahalanobis(const CovarianceEstimate& covariance);
  // Non-Mahalanobis kinds only; throws ArgumentError for Mahalanobis.
  static Distance FromKind(DistanceKind kind);

  DistanceKind kind() const { return kind_; }
  std::string_view name() const { return DistanceKindName(kind_); }

  // Throws ArgumentError on length mismatch, or for Cosine when either
  // vector is zero.
  double operator()(std::span<const double> x,
                    std::span<const double> x_bar) const;

  // Adds scale * d d(x, x_bar) / d x_bar to `gradient`. Non-smooth points
  // use the zero subgradient: Euclidean and Mahalanobis at x == x_bar,
  // Manhattan per coordinate where x_i == x_bar_i.
  void AccumulateGradient(std::span<const double> x,
                          std::span<const double> x_bar, double scale,
                          std::span<double> gradient) const;
  std::vector<double> Gradient(std::span<const double> x,
                               std::span<const double> x_bar) const;

 private:
  explicit Distance(DistanceKind kind) : kind_(kind) {}

  DistanceKind kind_;
  std::shared_ptr<const Eigen::LLT<Eigen::MatrixXd>> cholesky_;
};

}  // namespace treecf

#endif  // TREECF_DISTANCE_H_
