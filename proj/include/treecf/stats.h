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

#ifndef TREECF_STATS_H_
#define TREECF_STATS_H_

#include <span>

namespace treecf {

// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1],
// evaluated with Lentz's continued fraction.
double RegularizedIncompleteBeta(double a, double b, double x);

// P(|T| >= |t|) for Student's t with `df` degrees of freedom.
double StudentTTwoSidedPValue(double t, double df);

struct TTestResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
};

// Welch's unequal-variance two-sample t-test, two-sided. Each sample needs
// at least two entries (ArgumentError otherwise). When both variances are
// zero, equal means give t = 0, p = 1 and different means give an infinite
// t with p = 0.
TTestResult WelchTTest(std::span<const double> a, std::span<const double> b);

}  // namespace treecf

#endif  // TREECF_STATS_H_
