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
#include <random>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "gtest/gtest.h"
#include "treecf/errors.h"

namespace treecf {
namespace {

TEST(IncompleteBetaTest, MatchesBoost) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> shape(0.05, 60.0), unit(0.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const double a = shape(rng), b = shape(rng), x = unit(rng);
    const double want = boost::math::ibeta(a, b, x);
    EXPECT_NEAR(RegularizedIncompleteBeta(a, b, x), want,
                1e-12 + 1e-10 * want)
        << "a=" << a << " b=" << b << " x=" << x;
  }
  EXPECT_EQ(RegularizedIncompleteBeta(2.0, 3.0, 0.0), 0.0);
  EXPECT_EQ(RegularizedIncompleteBeta(2.0, 3.0, 1.0), 1.0);
  EXPECT_THROW(RegularizedIncompleteBeta(-1.0, 3.0, 0.5), ArgumentError);
  EXPECT_THROW(RegularizedIncompleteBeta(1.0, 3.0, 1.5), ArgumentError);
}

TEST(StudentTTest, TwoSidedPValueMatchesBoost) {
  for (double df : {1.0, 2.5, 7.0, 30.0, 500.0}) {
    const boost::math::students_t dist(df);
    for (double t : {0.0, 0.3, 1.0, 2.0, 4.5, 12.0}) {
      const double want = 2.0 * boost::math::cdf(boost::math::complement(dist, t));
      EXPECT_NEAR(StudentTTwoSidedPValue(t, df), want, 1e-12 + 1e-9 * want);
      EXPECT_DOUBLE_EQ(StudentTTwoSidedPValue(-t, df),
                       StudentTTwoSidedPValue(t, df));
    }
  }
  EXPECT_EQ(StudentTTwoSidedPValue(INFINITY, 5.0), 0.0);
}

// Welch statistics from the textbook formulas, checked against Boost's
// Student t for the p-value.
TTestResult OracleWelch(const std::vector<double>& a,
                        const std::vector<double>& b) {
  auto moments = [](const std::vector<double>& s) {
    double mean = 0.0;
    for (double v : s) mean += v;
    mean /= s.size();
    double ss = 0.0;
    for (double v : s) ss += (v - mean) * (v - mean);
    return std::pair{mean, ss / (s.size() - 1)};
  };
  const auto [ma, va] = moments(a);
  const auto [mb, vb] = moments(b);
  const double qa = va / a.size(), qb = vb / b.size();
  const double t = (ma - mb) / std::sqrt(qa + qb);
  const double df = (qa + qb) * (qa + qb) /
                    (qa * qa / (a.size() - 1) + qb * qb / (b.size() - 1));
  const boost::math::students_t dist(df);
  return {t, df,
          2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)))};
}

TEST(WelchTTestTest, MatchesOracleOnRandomSamples) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a(2 + trial % 30), b(2 + (trial * 7) % 41);
    const double shift = 0.1 * (trial % 9);
    const double scale = 0.5 + (trial % 4);
    for (double& v : a) v = normal(rng);
    for (double& v : b) v = shift + scale * normal(rng);
    const TTestResult got = WelchTTest(a, b);
    const TTestResult want = OracleWelch(a, b);
    EXPECT_NEAR(got.t, want.t, 1e-10 * std::max(1.0, std::abs(want.t)));
    EXPECT_NEAR(got.df, want.df, 1e-9 * want.df);
    EXPECT_NEAR(got.p, want.p, 1e-10);
  }
}

TEST(WelchTTestTest, Examples) {
  const std::vector<double> s{0.1, 0.4, 0.2, 0.8};
  const TTestResult same = WelchTTest(s, s);
  EXPECT_EQ(same.t, 0.0);
  EXPECT_EQ(same.p, 1.0);

  const std::vector<double> zeros(10, 0.0), ones(10, 1.0);
  EXPECT_LT(WelchTTest(zeros, ones).p, 1e-6);
  EXPECT_EQ(WelchTTest(zeros, zeros).p, 1.0);
  EXPECT_EQ(WelchTTest(zeros, zeros).t, 0.0);

  const std::vector<double> a{0.1, 0.3, 0.2, 0.25}, b{0.4, 0.5, 0.35, 0.6, 0.45};
  const TTestResult ab = WelchTTest(a, b), ba = WelchTTest(b, a);
  EXPECT_DOUBLE_EQ(ab.t, -ba.t);
  EXPECT_DOUBLE_EQ(ab.p, ba.p);

  EXPECT_THROW(WelchTTest(std::vector<double>{1.0}, s), ArgumentError);
}

}  // namespace
}  // namespace treecf
