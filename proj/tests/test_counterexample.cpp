// Copyright 2026 The evar Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "evar/counterexample.hpp"

namespace evar::counterexample {
namespace {

double xlogx(double w) { return w > 0.0 ? w * std::log(w) : 0.0; }

// int_0^1 log(1 + lambda (z - mu)) dz via w = 1 + lambda (z - mu).
double growth_closed(double lambda, double mu) {
  if (lambda == 0.0) return 0.0;
  const double a = 1.0 - lambda * mu, b = 1.0 + lambda * (1.0 - mu);
  return (xlogx(b) - xlogx(a)) / lambda - 1.0;
}

double zc_closed(double lambda, double mu, double c) {
  return std::min(1.0, mu + (c - 1.0) / lambda);
}

double constrained_closed(double lambda, double mu, double c) {
  if (lambda == 0.0) return 0.0;
  const double a = 1.0 - lambda * mu;
  const double zc = zc_closed(lambda, mu, c);
  const double w = 1.0 + lambda * (zc - mu);
  return (xlogx(w) - w - xlogx(a) + a) / lambda + (1.0 - zc) * std::log(c);
}

double constrained_derivative_closed(double lambda, double mu, double c) {
  const double a = 1.0 - lambda * mu;
  const double w = 1.0 + lambda * (zc_closed(lambda, mu, c) - mu);
  return (w - std::log(w) - a + std::log(a)) / (lambda * lambda);
}

TEST(LambdaStar, ReferenceValue) {
  const LambdaStar ls = solve_lambda_star(0.25);
  EXPECT_NEAR(ls.lambda, 3.6, 0.05);
  EXPECT_LE(std::abs(ls.residual), 1e-9);
  // Independent check: bisection on the closed-form derivative.
  auto d = [](double l) {
    return (growth_closed(l + 1e-6, 0.25) - growth_closed(l - 1e-6, 0.25)) / 2e-6;
  };
  double lo = 1.0, hi = 3.99;
  for (int i = 0; i < 60; ++i) (d(0.5 * (lo + hi)) > 0 ? lo : hi) = 0.5 * (lo + hi);
  EXPECT_NEAR(ls.lambda, 0.5 * (lo + hi), 1e-6);
}

TEST(LambdaStar, ShrinksAsMuApproachesHalf) {
  double prev = std::numeric_limits<double>::infinity();
  for (double mu : {0.3, 0.4, 0.45, 0.49, 0.499}) {
    const double l = solve_lambda_star(mu).lambda;
    EXPECT_LT(l, prev);
    prev = l;
  }
  EXPECT_LT(prev, 0.05);
}

TEST(LambdaStar, RejectsBadMu) {
  for (double mu : {0.0, 0.5, -0.1, 0.7, std::nan("")}) {
    EXPECT_THROW(solve_lambda_star(mu), ArgumentError) << mu;
  }
}

TEST(Growth, MatchesClosedForm) {
  for (double mu : {0.1, 0.25, 0.4}) {
    for (double l = 0.0; l < 1.0 / mu - 0.05; l += 0.37) {
      EXPECT_NEAR(unconstrained_growth(l, mu), growth_closed(l, mu), 1e-12)
          << mu << " " << l;
      for (double c : {1.5, 3.0, 10.0}) {
        EXPECT_NEAR(constrained_growth(l, mu, c), constrained_closed(l, mu, c),
                    1e-12)
            << mu << " " << l << " " << c;
      }
    }
  }
  EXPECT_EQ(constrained_growth(0.0, 0.25, 3.0), 0.0);
}

TEST(Growth, DerivativeIdentity) {
  const double mu = 0.25, c = 3.0, h = 1e-5;
  for (double l = 0.2; l < 3.9; l += 0.1) {
    const double fd =
        (constrained_growth(l + h, mu, c) - constrained_growth(l - h, mu, c)) /
        (2 * h);
    EXPECT_NEAR(constrained_growth_derivative(l, mu, c), fd, 1e-6) << l;
    EXPECT_NEAR(constrained_growth_derivative(l, mu, c),
                constrained_derivative_closed(l, mu, c), 1e-10)
        << l;
  }
}

TEST(Growth, StrictlyConcave) {
  const double mu = 0.25, c = 3.0, h = 0.01;
  for (double l = h; l < lambda_upper(mu) - h; l += h) {
    const double second = constrained_growth(l + h, mu, c) -
                          2 * constrained_growth(l, mu, c) +
                          constrained_growth(l - h, mu, c);
    EXPECT_LE(second, 0.0) << l;
  }
}

TEST(Growth, LargeCapIsUnconstrained) {
  for (double l : {0.5, 2.0, 3.5}) {
    EXPECT_NEAR(constrained_growth(l, 0.25, 1e6), unconstrained_growth(l, 0.25),
                1e-14);
  }
}

TEST(Verdict, ReferenceConfig) {
  const Verdict v = verify_counterexample({0.25, 3.0});
  EXPECT_TRUE(v.hypothesis_holds);
  EXPECT_TRUE(v.invariants_hold);
  EXPECT_GT(v.gap, 1e-4);
  EXPECT_LT(v.lambda_new, v.lambda_star);
  EXPECT_LT(v.grad_at_star, 0.0);
  EXPECT_NEAR(v.z_c_star, 0.25 + 2.0 / v.lambda_star, 1e-15);
  EXPECT_NEAR(v.growth_estar, constrained_closed(v.lambda_star, 0.25, 3.0), 1e-12);
  EXPECT_NEAR(v.growth_eprime, constrained_closed(v.lambda_new, 0.25, 3.0), 1e-12);
  EXPECT_NEAR(constrained_derivative_closed(v.lambda_new, 0.25, 3.0), 0.0, 1e-9);
}

TEST(Verdict, GlobalArgmaxOnGrid) {
  const double mu = 0.25, c = 3.0;
  const Verdict v = verify_counterexample({mu, c});
  const double hi = lambda_upper(mu);
  for (int i = 0; i <= 1000; ++i) {
    const double l = hi * i / 1000.0;
    EXPECT_GE(v.growth_eprime, constrained_closed(l, mu, c) - 1e-13) << l;
  }
}

TEST(Verdict, ClippedBetValidUnderNulls) {
  const double mu = 0.25, c = 3.0;
  const double l = verify_counterexample({mu, c}).lambda_new;
  EXPECT_LE(clipped_numeraire(mu, l, mu, c), 1.0);
  // Two-point laws on [0, 1] with mean <= mu.
  double worst = -1.0;
  for (int i = 0; i <= 100; ++i) {
    for (int j = i + 1; j <= 100; ++j) {
      const double x = i / 100.0, y = j / 100.0;
      if (x > mu) continue;
      for (double m : {mu, 0.5 * (x + std::min(y, mu)), x}) {
        const double p = (y - m) / (y - x);  // weight on x
        if (p < 0.0 || p > 1.0) continue;
        const double e = p * clipped_numeraire(x, l, mu, c) +
                         (1 - p) * clipped_numeraire(y, l, mu, c);
        worst = std::max(worst, e);
      }
    }
  }
  EXPECT_LE(worst, 1.0 + 1e-15);
}

TEST(Verdict, CapNeverBindingGivesNoGap) {
  const Verdict v = verify_counterexample({0.25, 1e6});
  EXPECT_FALSE(v.hypothesis_holds);
  EXPECT_NEAR(v.lambda_new, v.lambda_star, 1e-8);
  EXPECT_NEAR(v.gap, 0.0, 1e-14);
}

TEST(Verdict, RejectsBadConfig) {
  EXPECT_THROW(verify_counterexample({0.25, 1.0}), ArgumentError);
  EXPECT_THROW(verify_counterexample({0.6, 3.0}), ArgumentError);
}

}  // namespace
}  // namespace evar::counterexample
