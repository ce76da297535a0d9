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

#include "treecf/stats.h"

#include <cmath>
#include <limits>

#include "treecf/errors.h"

namespace treecf {
namespace {

constexpr int kMaxContinuedFractionTerms = 500;
constexpr double kContinuedFractionEpsilon = 1e-16;
constexpr double kTiny = 1e-300;

// Continued fraction for I_x(a, b); converges fast for x < (a+1)/(a+b+2).
double BetaContinuedFraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxContinuedFractionTerms; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kContinuedFractionEpsilon) return h;
  }
  throw NumericError("incomplete beta continued fraction did not converge");
}

double Mean(std::span<const double> v) {
  double sum = 0.0;
  for (double e : v) sum += e;
  return sum / static_cast<double>(v.size());
}

double SampleVariance(std::span<const double> v, double mean) {
  double sum = 0.0;
  for (double e : v) sum += (e - mean) * (e - mean);
  return sum / static_cast<double>(v.size() - 1);
}

}  // namespace

double RegularizedIncompleteBeta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) {
    throw ArgumentError("incomplete beta needs a, b > 0");
  }
  if (!(x >= 0.0 && x <= 1.0)) {
    throw ArgumentError("incomplete beta needs x in [0, 1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) -
                           std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * BetaContinuedFraction(a, b, x) / a;
  }
  return 1.0 - front * BetaContinuedFraction(b, a, 1.0 - x) / b;
}

double StudentTTwoSidedPValue(double t, double df) {
  if (!(df > 0.0)) throw ArgumentError("degrees of freedom must be positive");
  if (std::isnan(t)) throw ArgumentError("t statistic is NaN");
  if (std::isinf(t)) return 0.0;
  return RegularizedIncompleteBeta(0.5 * df, 0.5, df / (df + t * t));
}

TTestResult WelchTTest(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    throw ArgumentError("t-test needs at least two entries per sample");
  }
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double mean_a = Mean(a);
  const double mean_b = Mean(b);
  const double se_a = SampleVariance(a, mean_a) / na;
  const double se_b = SampleVariance(b, mean_b) / nb;
  const double se = se_a + se_b;
  TTestResult result;
  if (se == 0.0) {
    result.df = na + nb - 2.0;
    if (mean_a == mean_b) return result;
    result.t = mean_a > mean_b ? std::numeric_limits<double>::infinity()
                               : -std::numeric_limits<double>::infinity();
    result.p = 0.0;
    return result;
  }
  result.t = (mean_a - mean_b) / std::sqrt(se);
  result.df = se * se / (se_a * se_a / (na - 1.0) + se_b * se_b / (nb - 1.0));
  result.p = StudentTTwoSidedPValue(result.t, result.df);
  return result;
}

}  // namespace treecf
