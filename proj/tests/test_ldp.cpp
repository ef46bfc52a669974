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
#include <vector>

#include <gtest/gtest.h>

#include "evar/ldp.hpp"
#include "test_util.hpp"

namespace evar {
namespace {

using testing::bern_kl;

HypothesisPair bern_pair(double q) {
  return HypothesisPair(Distribution::bernoulli(0.5),
                        Distribution::bernoulli(q));
}

double rr_high(double eps) { return std::exp(eps) / (1 + std::exp(eps)); }
double rr_low(double eps) { return 1 / (1 + std::exp(eps)); }

// Every high/low channel assignment over the support, evaluated directly.
double exhaustive_j(const HypothesisPair& p, double eps) {
  const std::size_t n = p.size();
  double best = 0.0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    double m0 = 0, m1 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double q = (mask >> i & 1) ? rr_high(eps) : rr_low(eps);
      m0 += p.null_mass()[i] * q;
      m1 += p.alt_mass()[i] * q;
    }
    best = std::max(best, bern_kl(m1, m0));
  }
  return best;
}

TEST(InducedMarginal, Examples) {
  const double eps = 0.8;
  const HypothesisPair p = bern_pair(0.7);
  const BinaryMechanism below(0.1, PrivacyBudget(eps));
  const BinaryMechanism above(10.0, PrivacyBudget(eps));
  EXPECT_NEAR(induced_marginal(below, p.null_dist(), p), rr_high(eps), 1e-15);
  EXPECT_NEAR(induced_marginal(above, p.alt_dist(), p), rr_low(eps), 1e-15);
  const BinaryMechanism sep(1.0, PrivacyBudget(eps));  // L(0)=0.6, L(1)=1.4
  EXPECT_NEAR(induced_marginal(sep, p.alt_dist(), p),
              0.7 * rr_high(eps) + 0.3 * rr_low(eps), 1e-15);
}

TEST(ObjectiveKl, Examples) {
  const auto b = Distribution::bernoulli(0.3);
  const HypothesisPair same(b, b);
  for (double t : {0.5, 1.0, 2.0}) {
    EXPECT_EQ(objective_kl(BinaryMechanism(t, PrivacyBudget(1)), same), 0.0);
  }
  const HypothesisPair p = bern_pair(0.75);
  const double m1 = 0.75 * rr_high(1) + 0.25 * rr_low(1);
  EXPECT_NEAR(objective_kl(BinaryMechanism(1.0, PrivacyBudget(1)), p),
              bern_kl(m1, 0.5), 1e-15);
  // Shifts inside (L(0), L(1)) = (0.5, 1.5) cross no support point.
  for (double t : {0.5, 0.7, 1.2, 1.4999}) {
    EXPECT_EQ(objective_kl(BinaryMechanism(t, PrivacyBudget(1)), p),
              objective_kl(BinaryMechanism(1.0, PrivacyBudget(1)), p));
  }
}

TEST(Kairouz, BernoulliIsRandomizedResponse) {
  const HypothesisPair p = bern_pair(0.75);
  const BinaryMechanism k = kairouz_mechanism(p, PrivacyBudget(1.3));
  EXPECT_EQ(k.threshold(), 1.0);
  // T = {0}: x = 0 gets the low output probability, x = 1 the high one.
  EXPECT_NEAR(k.prob_one(likelihood_ratio(p, 0.0)), rr_low(1.3), 1e-15);
  EXPECT_NEAR(k.prob_one(likelihood_ratio(p, 1.0)), rr_high(1.3), 1e-15);
  EXPECT_TRUE(satisfies_ldp(k, p));
  const auto b = Distribution::bernoulli(0.4);
  const HypothesisPair same(b, b);
  EXPECT_EQ(objective_kl(kairouz_mechanism(same, PrivacyBudget(2)), same),
            0.0);
}

TEST(BinaryMechanism, ExactPrivacyAndComplement) {
  for (double eps : {1e-8, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0, 40.0}) {
    const BinaryMechanism m(1.0, PrivacyBudget(eps));
    EXPECT_TRUE(m.levels_private()) << eps;
    EXPECT_EQ(m.prob_one(2.0) + m.prob_zero(2.0), 1.0);
    EXPECT_EQ(m.prob_one(0.5) + m.prob_zero(0.5), 1.0);
    EXPECT_GE(m.high(), m.low());
  }
  EXPECT_THROW(PrivacyBudget(0.0), ArgumentError);
  EXPECT_THROW(PrivacyBudget(-1.0), ArgumentError);
  EXPECT_THROW(PrivacyBudget{INFINITY}, ArgumentError);
}

TEST(SolveBinaryThreshold, BernoulliMatchesRandomizedResponse) {
  for (double eps : {0.1, 0.5, 1.0, 3.0, 5.0}) {
    for (double q : {0.55, 0.75, 0.95}) {
      const HypothesisPair p = bern_pair(q);
      const auto sol = solve_binary_threshold(p, PrivacyBudget(eps));
      const double f = (2 * q - 1) * (std::exp(eps) - 1) / (std::exp(eps) + 1);
      EXPECT_NEAR(sol.objective, bern_kl((1 + f) / 2, 0.5), 1e-12);
      EXPECT_GE(sol.threshold, likelihood_ratio(p, 0.0));
      EXPECT_LT(sol.threshold, likelihood_ratio(p, 1.0));
      EXPECT_TRUE(satisfies_ldp(sol.mechanism, p));
    }
  }
}

TEST(SolveBinaryThreshold, IdenticalLawsAreDegenerate) {
  const auto d = Distribution::discrete({0, 1, 2}, {0.2, 0.3, 0.5});
  const auto sol = solve_binary_threshold(HypothesisPair(d, d),
                                          PrivacyBudget(1));
  EXPECT_EQ(sol.threshold, 1.0);
  EXPECT_EQ(sol.objective, 0.0);
  const auto g = Distribution::gaussian(0, 1);
  EXPECT_EQ(solve_binary_threshold(HypothesisPair(g, g), PrivacyBudget(1))
                .objective,
            0.0);
}

TEST(SolveBinaryThreshold, MatchesExhaustiveSearchOnRandomPairs) {
  std::mt19937_64 gen(2024);
  for (double eps : {0.5, 1.0, 2.0}) {
    for (int rep = 0; rep < 40; ++rep) {
      const HypothesisPair p = testing::random_pair(6, gen);
      const auto sol = solve_binary_threshold(p, PrivacyBudget(eps));
      EXPECT_NEAR(sol.objective, exhaustive_j(p, eps), 1e-9);
      EXPECT_TRUE(satisfies_ldp(sol.mechanism, p));
      // Reported thresholds all attain the optimum.
      for (double t : sol.optimal_thresholds) {
        EXPECT_NEAR(objective_kl(BinaryMechanism(t, PrivacyBudget(eps)), p),
                    sol.objective, 1e-12);
      }
      if (sol.interior) {
        const Marginals m = sol.marginals;
        EXPECT_LE(std::abs(sol.threshold -
                           threshold_fixed_point_map(m.m0, m.m1)),
                  1e-8);
      }
    }
  }
}

TEST(SolveBinaryThreshold, OptimalityOnLargerSupports) {
  std::mt19937_64 gen(77);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = testing::uniform_size(2, 12, gen);
    const HypothesisPair p = testing::random_pair(n, gen);
    const auto sol = solve_binary_threshold(p, PrivacyBudget(1.0));
    EXPECT_NEAR(sol.objective, exhaustive_j(p, 1.0), 1e-9);
  }
}

TEST(SolveBinaryThreshold, DataProcessingInequality) {
  std::mt19937_64 gen(3);
  for (int rep = 0; rep < 100; ++rep) {
    const HypothesisPair p =
        testing::random_pair(testing::uniform_size(2, 10, gen), gen);
    const double kl = kl_divergence(p.alt_dist(), p.null_dist());
    for (double eps : {0.1, 1.0, 10.0, 30.0}) {
      EXPECT_LE(solve_binary_threshold(p, PrivacyBudget(eps)).objective,
                kl + 1e-12);
    }
  }
}

TEST(SolveBinaryThreshold, GaussianPairFixedPoint) {
  const HypothesisPair p(Distribution::gaussian(0, 1),
                         Distribution::gaussian(0.5, 1));
  for (double eps : {0.5, 1.0, 3.0}) {
    const auto sol = solve_binary_threshold(p, PrivacyBudget(eps));
    // Independent scan over every realizable threshold on the grid.
    double best = 0.0;
    for (double t : p.lr()) {
      double m0 = 0, m1 = 0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        const double q = p.lr()[i] > t ? rr_high(eps) : rr_low(eps);
        m0 += p.null_mass()[i] * q;
        m1 += p.alt_mass()[i] * q;
      }
      best = std::max(best, bern_kl(m1, m0));
    }
    EXPECT_NEAR(sol.objective, best, 1e-9) << sol.method;
    EXPECT_TRUE(satisfies_ldp(sol.mechanism, p));
    if (sol.interior) {
      EXPECT_LE(sol.residual, 1e-8);
    }
  }
}

TEST(PrivateEVariable, RatioOfMarginals) {
  const auto d = Distribution::discrete({0, 1}, {0.5, 0.5});
  const auto ev =
      private_evariable(BinaryMechanism(1.0, PrivacyBudget(1)),
                        HypothesisPair(d, d));
  EXPECT_EQ(ev.v0, 1.0);
  EXPECT_EQ(ev.v1, 1.0);

  std::mt19937_64 gen(8);
  for (int rep = 0; rep < 100; ++rep) {
    const HypothesisPair p = testing::random_pair(7, gen);
    const auto sol = solve_binary_threshold(p, PrivacyBudget(0.7));
    const auto e = private_evariable(sol.mechanism, p);
    const double m0 = induced_marginal(sol.mechanism, p.null_dist(), p);
    const double m1 = induced_marginal(sol.mechanism, p.alt_dist(), p);
    EXPECT_NEAR(e.v1, m1 / m0, 1e-12);
    EXPECT_NEAR(e.v0, (1 - m1) / (1 - m0), 1e-12);
    EXPECT_NEAR(e.null_expectation(), 1.0, 1e-15);
    EXPECT_NEAR(growth_rate(e).growth_rate, sol.objective, 1e-15);
  }
}

TEST(PrivateEVariable, BernoulliGivesKellyBet) {
  for (double eps : {0.1, 1.0, 5.0}) {
    for (double q : {0.6, 0.75, 0.9}) {
      const HypothesisPair p = bern_pair(q);
      const auto sol = solve_binary_threshold(p, PrivacyBudget(eps));
      const auto ev = private_evariable(sol.mechanism, p);
      const double f = (2 * q - 1) * (std::exp(eps) - 1) / (std::exp(eps) + 1);
      EXPECT_NEAR(ev.v1, 1 + f, 1e-12);
      EXPECT_NEAR(ev.v0, 1 - f, 1e-12);
    }
  }
}

TEST(KellyFraction, Examples) {
  EXPECT_NEAR(kelly_fraction(0.75, PrivacyBudget(std::log(3.0))), 0.25,
              1e-15);
  EXPECT_NEAR(kelly_fraction(0.8, PrivacyBudget(50.0)), 0.6, 1e-15);
  EXPECT_LT(kelly_fraction(0.8, PrivacyBudget(1e-9)), 1e-9);
  EXPECT_GT(kelly_fraction(0.8, PrivacyBudget(1e-9)), 0.0);
  for (double q : {0.5, 1.0, 0.2, 1.5}) {
    EXPECT_THROW(kelly_fraction(q, PrivacyBudget(1)), ArgumentError);
  }
}

TEST(SimulateKelly, InvariantsAndDeterminism) {
  const auto a = simulate_ldp_kelly(0.75, 0.75, PrivacyBudget(1), 5000, 7);
  const auto b = simulate_ldp_kelly(0.75, 0.75, PrivacyBudget(1), 5000, 7);
  EXPECT_EQ(a.bits, b.bits);
  EXPECT_EQ(a.log_wealth, b.log_wealth);
  ASSERT_EQ(a.log_wealth.size(), 5001u);
  EXPECT_EQ(a.wealth(0), 1.0);
  const double f = kelly_fraction(0.75, PrivacyBudget(1));
  for (std::size_t r = 1; r <= a.rounds(); ++r) {
    EXPECT_GT(a.wealth(r), 0.0);
    const double step = a.log_wealth[r] - a.log_wealth[r - 1];
    EXPECT_TRUE(std::abs(step - std::log1p(f)) < 1e-12 ||
                std::abs(step - std::log1p(-f)) < 1e-12);
    EXPECT_DOUBLE_EQ(a.e_value(r), a.bits[r - 1] ? 1 + f : 1 - f);
  }
  const auto c = simulate_ldp_kelly(0.75, 0.75, PrivacyBudget(1), 5000, 8);
  EXPECT_NE(a.bits, c.bits);
  EXPECT_THROW(simulate_ldp_kelly(0.75, 0.75, PrivacyBudget(1), 0, 1),
               ArgumentError);
}

TEST(SimulateKelly, MeanLogGrowthMatchesBernoulliKl) {
  const double eps = 1.0, q = 0.75;
  const std::int64_t n = 1000000;
  const auto tr = simulate_ldp_kelly(q, q, PrivacyBudget(eps), n, 123);
  const double f = (2 * q - 1) * std::tanh(eps / 2);
  const double m1 = (1 + f) / 2;
  // Per-round log increments take two values; their variance is exact.
  const double a = std::log1p(f), b = std::log1p(-f);
  const double mean = m1 * a + (1 - m1) * b;
  const double sd = std::abs(a - b) * std::sqrt(m1 * (1 - m1));
  EXPECT_NEAR(mean, bern_kl(m1, 0.5), 1e-15);
  const double emp = tr.log_wealth.back() / n;
  EXPECT_LE(std::abs(emp - mean), 3 * sd / std::sqrt(double(n)));
}

TEST(RandomizedPostprocess, Examples) {
  const HypothesisPair p = bern_pair(0.75);
  const auto sol = solve_binary_threshold(p, PrivacyBudget(1));
  const auto ev = private_evariable(sol.mechanism, p);
  EXPECT_EQ(randomized_postprocess(p, ev, 1.0, 0.5 * rr_high(1)), ev.v1);
  EXPECT_EQ(randomized_postprocess(p, ev, 1.0, 0.999), ev.v0);
  EXPECT_EQ(randomized_postprocess(p, ev, 0.0, 0.5 * rr_low(1)), ev.v1);
  EXPECT_EQ(randomized_postprocess(p, ev, 0.0, 0.5), ev.v0);
}

// Locates where the output switches from v1 to v0 as u grows; the channel
// is exact when that breakpoint equals Q(1|x).
TEST(RandomizedPostprocess, ConditionalLawIsTheChannel) {
  std::mt19937_64 gen(99);
  for (int rep = 0; rep < 30; ++rep) {
    const HypothesisPair p = testing::random_pair(6, gen);
    const auto sol = solve_binary_threshold(p, PrivacyBudget(0.9));
    const auto ev = private_evariable(sol.mechanism, p);
    ASSERT_NE(ev.v0, ev.v1);
    for (double x : p.points()) {
      const double q1 = sol.mechanism.prob_one(likelihood_ratio(p, x));
      // One switch only: scan a u-grid.
      int switches = 0;
      double prev = randomized_postprocess(p, ev, x, 0.0);
      EXPECT_EQ(prev, ev.v1);
      for (int k = 1; k < 4096; ++k) {
        const double v = randomized_postprocess(p, ev, x, k / 4096.0);
        switches += v != prev;
        prev = v;
      }
      EXPECT_EQ(switches, 1);
      double lo = 0.0, hi = 1.0;
      while (std::nextafter(lo, 1.0) < hi) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (randomized_postprocess(p, ev, x, mid) == ev.v1 ? lo : hi) = mid;
      }
      EXPECT_NEAR(hi, q1, 1e-12);
    }
    // Output law under P0 is Ber(m0) on {v0, v1}.
    double p_v1 = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      p_v1 += p.null_mass()[i] * sol.mechanism.prob_one(p.lr()[i]);
    }
    EXPECT_NEAR(p_v1, ev.marginals.m0, 1e-15);
  }
}

TEST(Ldp, EveryConstructedMechanismIsPrivate) {
  std::mt19937_64 gen(13);
  for (int rep = 0; rep < 100; ++rep) {
    const HypothesisPair p =
        testing::random_pair(testing::uniform_size(1, 12, gen), gen);
    for (double eps : {0.01, 0.5, 1.0, 2.0, 5.0, 25.0}) {
      const auto sol = solve_binary_threshold(p, PrivacyBudget(eps));
      ASSERT_TRUE(satisfies_ldp(sol.mechanism, p));
      // Pairwise check over the grid, exact via fma.
      const double e = std::exp(eps);
      for (double a : p.lr()) {
        for (double b : p.lr()) {
          const auto& m = sol.mechanism;
          EXPECT_GE(std::fma(m.prob_one(b), e, -m.prob_one(a)), 0.0);
          EXPECT_GE(std::fma(m.prob_zero(b), e, -m.prob_zero(a)), 0.0);
        }
      }
    }
  }
}

}  // namespace
}  // namespace evar
