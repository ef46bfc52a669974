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
#include <random>

#include <gtest/gtest.h>

#include "evar/distribution.hpp"
#include "evar/quadrature.hpp"
#include "test_util.hpp"

namespace evar {
namespace {

using testing::bern_kl;

TEST(Expectation, Examples) {
  const auto d = Distribution::discrete({0, 1}, {0.5, 0.5});
  EXPECT_DOUBLE_EQ(expectation(d, [](double x) { return x; }), 0.5);
  EXPECT_NEAR(expectation(Distribution::uniform(0, 1),
                          [](double x) { return x * x; }),
              1.0 / 3.0, 1e-10);
  EXPECT_DOUBLE_EQ(
      expectation(Distribution::bernoulli(0.75), [](double x) { return x; }),
      0.75);
}

TEST(Expectation, UnitMassForEveryKind) {
  for (const auto& d :
       {Distribution::discrete({-1, 2, 7}, {0.2, 0.3, 0.5}),
        Distribution::bernoulli(0.3), Distribution::gaussian(1.0, 2.0),
        Distribution::uniform(-3, 5)}) {
    EXPECT_NEAR(expectation(d, [](double) { return 1.0; }), 1.0, 1e-12)
        << d.describe();
  }
}

TEST(Expectation, GaussianMoments) {
  const auto g = Distribution::gaussian(0.7, 1.3);
  EXPECT_NEAR(expectation(g, [](double x) { return x; }), 0.7, 1e-10);
  EXPECT_NEAR(expectation(g, [](double x) { return (x - 0.7) * (x - 0.7); }),
              1.69, 1e-10);
}

TEST(Expectation, NonFiniteValueNamesThePoint) {
  const auto d = Distribution::discrete({0, 1, 2}, {0.25, 0.25, 0.5});
  try {
    expectation(d, [](double x) { return x == 1 ? NAN : x; });
    FAIL() << "expected IntegrationError";
  } catch (const IntegrationError& e) {
    EXPECT_EQ(e.point(), 1.0);
  }
}

TEST(Distribution, ConstructionInvariants) {
  const auto d = Distribution::discrete({3, 1, 2}, {0.5, 0.0, 0.5});
  ASSERT_EQ(d.support().size(), 2u);  // zero-mass atom pruned
  EXPECT_EQ(d.support()[0], 2.0);
  EXPECT_EQ(d.support()[1], 3.0);
  EXPECT_THROW(Distribution::discrete({0, 1}, {0.5, 0.6}), ArgumentError);
  EXPECT_THROW(Distribution::discrete({0, 0}, {0.5, 0.5}), ArgumentError);
  EXPECT_THROW(Distribution::discrete({0, 1}, {-0.1, 1.1}), ArgumentError);
  EXPECT_THROW(Distribution::bernoulli(1.5), ArgumentError);
  EXPECT_THROW(Distribution::gaussian(0, 1, QuadratureSpec{0, 1, 8}),
               ArgumentError);
  EXPECT_THROW(Distribution::gaussian(0, 1, QuadratureSpec{1, 0, 64}),
               ArgumentError);
  EXPECT_THROW(Distribution::uniform(1, 1), ArgumentError);
  const auto g = Distribution::gaussian(2.0, 0.5);
  EXPECT_DOUBLE_EQ(g.quad().lo, 2.0 - 8 * 0.5);
  EXPECT_DOUBLE_EQ(g.quad().hi, 2.0 + 8 * 0.5);
  EXPECT_EQ(g.quad().nodes, 256);
  const auto u = Distribution::uniform(-1, 4);
  EXPECT_DOUBLE_EQ(u.quad().lo, -1);
  EXPECT_DOUBLE_EQ(u.quad().hi, 4);
}

TEST(HypothesisPair, MixedKindsRejected) {
  EXPECT_THROW(HypothesisPair(Distribution::bernoulli(0.5),
                              Distribution::gaussian(0, 1)),
               ArgumentError);
}

TEST(LikelihoodRatio, Examples) {
  const auto b = Distribution::bernoulli(0.5);
  const HypothesisPair same(b, b);
  for (double x : {0.0, 1.0}) EXPECT_EQ(likelihood_ratio(same, x), 1.0);
  const HypothesisPair bern(b, Distribution::bernoulli(0.75));
  EXPECT_DOUBLE_EQ(likelihood_ratio(bern, 1.0), 1.5);
  EXPECT_DOUBLE_EQ(likelihood_ratio(bern, 0.0), 0.5);

  const HypothesisPair gauss(Distribution::gaussian(0, 1),
                             Distribution::gaussian(0.5, 1));
  // Density ratio written out independently.
  auto phi = [](double x, double m) {
    return std::exp(-0.5 * (x - m) * (x - m)) / std::sqrt(2 * M_PI);
  };
  EXPECT_NEAR(likelihood_ratio(gauss, 0.5), phi(0.5, 0.5) / phi(0.5, 0.0),
              1e-13);
  EXPECT_NEAR(likelihood_ratio(gauss, 0.5), std::exp(0.125), 1e-13);
  for (double x : {-3.0, 0.0, 2.5}) {
    EXPECT_NEAR(likelihood_ratio(gauss, x), std::exp(0.5 * x - 0.125),
                1e-12 * std::exp(0.5 * x));
  }
}

TEST(LikelihoodRatio, AbsoluteContinuityFailure) {
  const auto p0 = Distribution::discrete({0, 1}, {1.0, 0.0});
  const auto p1 = Distribution::discrete({0, 1}, {0.5, 0.5});
  EXPECT_THROW(HypothesisPair(p0, p1), AbsoluteContinuityError);
  EXPECT_THROW(kl_divergence(p1, p0), AbsoluteContinuityError);
  // The other direction is fine: L = 0 where the alternative has no mass.
  const HypothesisPair ok(p1, p0);
  EXPECT_EQ(likelihood_ratio(ok, 1.0), 0.0);
  EXPECT_THROW(likelihood_ratio(ok, 0.5), ArgumentError);
  const HypothesisPair u(Distribution::uniform(0, 2),
                         Distribution::uniform(0, 1));
  EXPECT_THROW(HypothesisPair(Distribution::uniform(0, 1),
                              Distribution::uniform(0, 2)),
               AbsoluteContinuityError);
  EXPECT_EQ(likelihood_ratio(u, 1.5), 0.0);
}

TEST(KlDivergence, Examples) {
  const auto b = Distribution::bernoulli(0.5);
  EXPECT_EQ(kl_divergence(b, b), 0.0);
  EXPECT_NEAR(kl_divergence(Distribution::bernoulli(0.75), b),
              0.75 * std::log(1.5) + 0.25 * std::log(0.5), 1e-15);
  EXPECT_NEAR(kl_divergence(Distribution::bernoulli(0.75), b), 0.13081, 1e-5);
  // Gaussian location shift: KL = delta^2 / 2.
  EXPECT_NEAR(kl_divergence(Distribution::gaussian(0.5, 1),
                            Distribution::gaussian(0, 1)),
              0.125, 1e-10);
}

TEST(KlDivergence, BernoulliIncreasingInM1AboveM0) {
  for (double m0 : {0.1, 0.5, 0.8}) {
    double prev = 0.0;
    for (int k = 1; k <= 200; ++k) {
      const double m1 = m0 + (1.0 - m0) * k / 201.0;
      const double kl = kl_divergence(Distribution::bernoulli(m1),
                                      Distribution::bernoulli(m0));
      EXPECT_NEAR(kl, bern_kl(m1, m0), 1e-14);
      EXPECT_GT(kl, prev);
      prev = kl;
    }
  }
}

TEST(KlDivergence, NonnegativeZeroIffEqualOnRandomPairs) {
  std::mt19937_64 gen(11);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = testing::uniform_size(1, 12, gen);
    const auto s = testing::iota_support(n);
    const auto p = Distribution::discrete(s, testing::dirichlet(n, gen));
    const auto q = Distribution::discrete(s, testing::dirichlet(n, gen));
    const double kl = kl_divergence(p, q);
    EXPECT_GE(kl, 0.0);
    EXPECT_EQ(kl_divergence(p, p), 0.0);
    if (n > 1) {
      EXPECT_GT(kl, 0.0);
    }
  }
}

TEST(HypothesisPair, LikelihoodRatioHasUnitNullMean) {
  std::mt19937_64 gen(5);
  for (int rep = 0; rep < 50; ++rep) {
    const HypothesisPair p = testing::random_pair(8, gen);
    std::vector<double> l(p.lr().begin(), p.lr().end());
    EXPECT_NEAR(p.null_sum(l), 1.0, 1e-12);
  }
  for (const auto& [a, b] :
       {std::pair{Distribution::gaussian(0, 1), Distribution::gaussian(1, 1)},
        std::pair{Distribution::gaussian(0, 1), Distribution::gaussian(0, 2)},
        std::pair{Distribution::uniform(0, 1), Distribution::uniform(0, 1)}}) {
    const HypothesisPair p(a, b);
    std::vector<double> l(p.lr().begin(), p.lr().end());
    EXPECT_NEAR(p.null_sum(l), 1.0, 1e-8);
    // Same mean by direct quadrature of p0 * (p1 / p0) on the window.
    const QuadratureSpec w = *p.window();
    const double direct = integrate(
        [&](double x) { return a.density(x) * (b.density(x) / a.density(x)); },
        w.lo, w.hi, w.nodes);
    EXPECT_NEAR(direct, 1.0, 1e-8);
  }
}

TEST(GrowthOfValues, ZeroValueUnderAlternativeIsMinusInfinity) {
  const HypothesisPair p(Distribution::bernoulli(0.5),
                         Distribution::bernoulli(0.75));
  const std::vector<double> v{0.0, 2.0};
  const GrowthReport g = growth_of_values(p, v);
  EXPECT_FALSE(g.growth_finite());
  EXPECT_DOUBLE_EQ(g.null_expectation, 1.0);
}

}  // namespace
}  // namespace evar
