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

#ifndef EVAR_LDP_HPP_
#define EVAR_LDP_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "evar/core.hpp"
#include "evar/distribution.hpp"
#include "evar/numeric.hpp"

namespace evar {

// epsilon-LDP budget in nats of privacy loss.
class PrivacyBudget {
 public:
  explicit PrivacyBudget(double epsilon) : epsilon_(epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
      throw ArgumentError(
          str_cat("privacy budget must be positive and finite, got ",
                  epsilon));
    }
  }
  double epsilon() const { return epsilon_; }
  double exp_epsilon() const { return std::exp(epsilon_); }

 private:
  double epsilon_;
};

// Binary-output channel on the likelihood-ratio scale:
//   Q(1|x) = e^eps/(1+e^eps)  if L(x) >  t
//   Q(1|x) =     1/(1+e^eps)  if L(x) <= t
//
// The levels are nudged toward each other by whole ulps until both
// output-likelihood ratios satisfy the e^eps bound exactly in floating point
// (for eps above ~37, 1 - 1/(1+e^eps) rounds to 1 and high must move down);
// a nudge only ever makes the channel more private.
class BinaryMechanism {
 public:
  BinaryMechanism(double threshold, PrivacyBudget budget)
      : threshold_(threshold), budget_(budget) {
    const double e = budget_.exp_epsilon();
    low_ = 1.0 / (1.0 + e);
    high_ = 1.0 - low_;
    for (int i = 0; i < 256 && !levels_private(); ++i) {
      if (std::fma(low_, e, -high_) < 0.0) low_ = std::nextafter(low_, 1.0);
      if (std::fma(1.0 - high_, e, -(1.0 - low_)) < 0.0) {
        high_ = std::nextafter(high_, 0.0);
      }
    }
    if (!levels_private()) {
      throw ArgumentError(str_cat("cannot realize an exactly ", epsilon(),
                                  "-private channel in double precision"));
    }
  }

  double threshold() const { return threshold_; }
  const PrivacyBudget& budget() const { return budget_; }
  double epsilon() const { return budget_.epsilon(); }
  // Q(1|x) on the two sides of the threshold.
  double high() const { return high_; }
  double low() const { return low_; }

  double prob_one(double lr) const { return lr > threshold_ ? high_ : low_; }
  double prob_zero(double lr) const { return 1.0 - prob_one(lr); }

  // The two pointwise LDP constraints on the output levels, checked
  // without rounding: sign(fma(a, e, -b)) is the sign of a*e - b.
  bool levels_private() const {
    const double e = budget_.exp_epsilon();
    return std::fma(low_, e, -high_) >= 0.0 &&
           std::fma(1.0 - high_, e, -(1.0 - low_)) >= 0.0;
  }

 private:
  double threshold_;
  PrivacyBudget budget_;
  double low_ = 0.0;
  double high_ = 0.0;
};

// Every pair (x, x') of grid points satisfies both output ratio bounds.
inline bool satisfies_ldp(const BinaryMechanism& mech,
                          const HypothesisPair& pair) {
  const double e = mech.budget().exp_epsilon();
  double q1_min = 1.0, q1_max = 0.0, q0_min = 1.0, q0_max = 0.0;
  for (double l : pair.lr()) {
    q1_min = std::min(q1_min, mech.prob_one(l));
    q1_max = std::max(q1_max, mech.prob_one(l));
    q0_min = std::min(q0_min, mech.prob_zero(l));
    q0_max = std::max(q0_max, mech.prob_zero(l));
  }
  return std::fma(q1_min, e, -q1_max) >= 0.0 &&
         std::fma(q0_min, e, -q0_max) >= 0.0;
}

// Atoms of a pair member (or any law on the same sample space) aligned with
// the pair's grid: continuous laws are discretized on the pair window.
inline Atoms atoms_on_grid(const Distribution& dist,
                           const HypothesisPair& pair) {
  if (dist.is_continuous() != pair.is_continuous()) {
    throw ArgumentError(str_cat(dist.describe(),
                                " does not live on the pair's sample space"));
  }
  if (dist.is_continuous()) return dist.atoms_on(*pair.window());
  return dist.atoms();
}

// m = E[Q(1|X)] for X ~ member.
inline double induced_marginal(const BinaryMechanism& mech,
                               const Distribution& member,
                               const HypothesisPair& pair) {
  const Atoms a = atoms_on_grid(member, pair);
  double m = 0.0;
  for (std::size_t i = 0; i < a.x.size(); ++i) {
    if (a.w[i] <= 0.0) continue;
    m += a.w[i] * mech.prob_one(pair.likelihood_ratio(a.x[i]));
  }
  return m;
}

struct Marginals {
  double m0 = 0.0;  // P(Y=1) under the null
  double m1 = 0.0;  // P(Y=1) under the alternative
};

inline Marginals marginals(const BinaryMechanism& mech,
                           const HypothesisPair& pair) {
  Marginals m;
  for (std::size_t i = 0; i < pair.size(); ++i) {
    const double q = mech.prob_one(pair.lr()[i]);
    m.m0 += pair.null_mass()[i] * q;
    m.m1 += pair.alt_mass()[i] * q;
  }
  return m;
}

// J(Q) = d(Ber(m1) || Ber(m0)).
inline double objective_kl(const BinaryMechanism& mech,
                           const HypothesisPair& pair) {
  const Marginals m = marginals(mech, pair);
  return bernoulli_kl(m.m1, m.m0);
}

// Two-output staircase mechanism: low output on {p0 >= p1}, i.e. t = 1.
inline BinaryMechanism kairouz_mechanism(const HypothesisPair& /*pair*/,
                                         PrivacyBudget budget) {
  return BinaryMechanism(1.0, budget);
}

// Stationarity map of the threshold problem:
//   t = (m1 - m0) / (m0 (1 - m0) log(m1 (1 - m0) / (m0 (1 - m1)))).
// NaN when m1 == m0 (no information, map undefined).
inline double threshold_fixed_point_map(double m0, double m1) {
  if (m1 == m0) return std::numeric_limits<double>::quiet_NaN();
  const double log_odds =
      std::log(m1) + std::log1p(-m0) - std::log(m0) - std::log1p(-m1);
  return (m1 - m0) / (m0 * (1.0 - m0) * log_odds);
}

namespace detail {

// Likelihood-ratio level sets of a pair: distinct L values ascending with
// the null/alternative mass strictly above each level.
class LevelSets {
 public:
  explicit LevelSets(const HypothesisPair& pair) {
    std::vector<std::size_t> order(pair.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return pair.lr()[a] < pair.lr()[b];
    });
    for (std::size_t i : order) {
      const double l = pair.lr()[i];
      if (levels_.empty() || l != levels_.back()) {
        levels_.push_back(l);
        at0_.push_back(0.0);
        at1_.push_back(0.0);
      }
      at0_.back() += pair.null_mass()[i];
      at1_.back() += pair.alt_mass()[i];
    }
    const std::size_t k = levels_.size();
    tail0_.assign(k, 0.0);
    tail1_.assign(k, 0.0);
    // tail[j] = mass of {L > levels[j]}, accumulated from the top.
    double s0 = 0.0, s1 = 0.0;
    for (std::size_t j = k; j-- > 0;) {
      tail0_[j] = s0;
      tail1_[j] = s1;
      s0 += at0_[j];
      s1 += at1_[j];
    }
  }

  std::span<const double> levels() const { return levels_; }
  // Masses of {L > levels[j]}.
  double tail0(std::size_t j) const { return tail0_[j]; }
  double tail1(std::size_t j) const { return tail1_[j]; }

  // Masses of {L > t} for arbitrary t.
  std::pair<double, double> tail_at(double t) const {
    const auto it = std::upper_bound(levels_.begin(), levels_.end(), t);
    if (it == levels_.begin()) {
      double s0 = 0.0, s1 = 0.0;
      for (std::size_t j = 0; j < at0_.size(); ++j) {
        s0 += at0_[j];
        s1 += at1_[j];
      }
      return {s0, s1};
    }
    const std::size_t j = static_cast<std::size_t>(it - levels_.begin()) - 1;
    return {tail0_[j], tail1_[j]};
  }

  // Index of the piece [levels[j], levels[j+1]) containing t, or npos.
  std::size_t piece_of(double t) const {
    const auto it = std::upper_bound(levels_.begin(), levels_.end(), t);
    if (it == levels_.begin()) return npos;
    return static_cast<std::size_t>(it - levels_.begin()) - 1;
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::vector<double> levels_;
  std::vector<double> at0_, at1_;
  std::vector<double> tail0_, tail1_;
};

}  // namespace detail

struct BinaryThresholdSolution {
  double threshold = 1.0;
  BinaryMechanism mechanism{1.0, PrivacyBudget(1.0)};
  double objective = 0.0;  // J at the returned mechanism
  Marginals marginals;
  // |t - map(t)|; zero when the optimum is interior and located exactly.
  double residual = 0.0;
  bool interior = false;
  std::string method;  // "degenerate", "enumeration", "fixed-point", "golden"
  int iterations = 0;
  // Every candidate threshold attaining the maximum (discrete path).
  std::vector<double> optimal_thresholds;
};

struct BinaryThresholdOptions {
  Tolerances tol;
  // Relative slack when collecting ties among enumerated candidates.
  double tie_tolerance = 1e-15;
};

// Optimal epsilon-LDP binary mechanism: exact enumeration of thresholds for
// discrete pairs; for continuous pairs a damped fixed point raced against
// golden-section search, checked against enumeration over the grid levels.
inline BinaryThresholdSolution solve_binary_threshold(
    const HypothesisPair& pair, PrivacyBudget budget,
    const BinaryThresholdOptions& opts = {}) {
  BinaryThresholdSolution sol;
  sol.mechanism = BinaryMechanism(1.0, budget);
  const double lo = sol.mechanism.low();
  const double span = sol.mechanism.high() - lo;

  if (pair.identical()) {
    sol.method = "degenerate";
    sol.marginals = marginals(sol.mechanism, pair);
    sol.optimal_thresholds = {1.0};
    return sol;
  }

  const detail::LevelSets sets(pair);
  auto marginals_at = [&](double t) {
    const auto [a0, a1] = sets.tail_at(t);
    return Marginals{lo + span * a0, lo + span * a1};
  };
  auto objective_at = [&](double t) {
    const Marginals m = marginals_at(t);
    return bernoulli_kl(m.m1, m.m0);
  };
  auto map_at = [&](double t) {
    const Marginals m = marginals_at(t);
    return threshold_fixed_point_map(m.m0, m.m1);
  };
  auto finish = [&](double t) {
    sol.threshold = t;
    sol.mechanism = BinaryMechanism(t, budget);
    sol.marginals = marginals(sol.mechanism, pair);
    sol.objective = bernoulli_kl(sol.marginals.m1, sol.marginals.m0);
    const double rhs = map_at(t);
    sol.residual = std::isfinite(rhs) ? std::abs(t - rhs)
                                      : std::numeric_limits<double>::infinity();
  };

  const auto levels = sets.levels();
  // Exact maximization over the realizable thresholds (one per L level).
  std::vector<double> values(levels.size());
  std::size_t best_j = 0;
  for (std::size_t j = 0; j < levels.size(); ++j) {
    const Marginals m{lo + span * sets.tail0(j), lo + span * sets.tail1(j)};
    values[j] = bernoulli_kl(m.m1, m.m0);
    if (values[j] > values[best_j]) best_j = j;
  }
  auto take_enumeration = [&]() {
    sol.method = "enumeration";
    sol.iterations = static_cast<int>(levels.size());
    sol.optimal_thresholds.clear();
    for (std::size_t j = 0; j < levels.size(); ++j) {
      if (values[j] >= values[best_j] * (1.0 - opts.tie_tolerance)) {
        sol.optimal_thresholds.push_back(levels[j]);
      }
    }
    // Any t in [levels[j], levels[j+1]) realizes the same set; prefer the
    // fixed point of the stationarity map when it lands in that piece.
    const double rhs = map_at(levels[best_j]);
    const double upper = best_j + 1 < levels.size()
                             ? levels[best_j + 1]
                             : std::numeric_limits<double>::infinity();
    sol.interior = std::isfinite(rhs) && rhs >= levels[best_j] && rhs < upper;
    finish(sol.interior ? rhs : levels[best_j]);
    return sol;
  };
  if (!pair.is_continuous()) return take_enumeration();

  // Continuous: damped fixed point seeded at t = 1.
  const Tolerances& tol = opts.tol;
  double t = 1.0;
  bool converged = false;
  int it = 0;
  for (; it < tol.fixed_point_max_iter; ++it) {
    const double rhs = map_at(t);
    if (!std::isfinite(rhs) || rhs <= 0.0) break;
    const double next =
        (1.0 - tol.fixed_point_damping) * t + tol.fixed_point_damping * rhs;
    if (std::abs(next - t) <= tol.fixed_point * std::max(1.0, std::abs(t))) {
      t = next;
      converged = true;
      break;
    }
    t = next;
  }
  // Golden-section on log t across the observed likelihood-ratio range.
  const auto first_positive =
      std::upper_bound(levels.begin(), levels.end(), 0.0);
  const double log_lo = std::log(0.5 * *first_positive);
  const double log_hi = std::log(levels.back());
  const double t_golden = std::exp(detail::golden_section_max(
      [&](double s) { return objective_at(std::exp(s)); }, log_lo, log_hi));

  const double j_fp = converged ? objective_at(t) : -1.0;
  const double j_golden = objective_at(t_golden);
  if (!(std::max(j_fp, j_golden) >= 0.0)) {
    throw SolverError("binary threshold: fixed point and golden-section "
                      "search both failed",
                      t, std::abs(t - map_at(t)));
  }
  // The discretized law is finite, so enumeration certifies both paths.
  if (values[best_j] > std::max(j_fp, j_golden)) return take_enumeration();
  sol.iterations = it;
  if (converged && j_fp >= j_golden) {
    sol.method = "fixed-point";
    // Land exactly on the fixed point when the map is flat around t.
    const double rhs = map_at(t);
    finish(sets.piece_of(rhs) == sets.piece_of(t) ? rhs : t);
  } else {
    sol.method = "golden";
    finish(t_golden);
  }
  sol.interior = sol.threshold > levels.front() &&
                 sol.threshold < levels.back() && sol.residual <= 1e-8;
  sol.optimal_thresholds = {sol.threshold};
  return sol;
}

// Log-optimal e-variable of the privatized bit: the ratio of the induced
// output laws, E(Y=1) = v1, E(Y=0) = v0.
struct PrivateEVariable {
  double v0 = 1.0;
  double v1 = 1.0;
  BinaryMechanism mechanism{1.0, PrivacyBudget(1.0)};
  Marginals marginals;

  double value(int y) const { return y == 1 ? v1 : v0; }
  double null_expectation() const {
    return marginals.m0 * v1 + (1.0 - marginals.m0) * v0;
  }
  double growth() const { return bernoulli_kl(marginals.m1, marginals.m0); }
};

inline PrivateEVariable private_evariable_from_marginals(
    const BinaryMechanism& mech, Marginals m) {
  PrivateEVariable ev;
  ev.mechanism = mech;
  ev.marginals = m;
  ev.v1 = m.m1 / m.m0;
  ev.v0 = (1.0 - m.m1) / (1.0 - m.m0);
  return ev;
}

inline PrivateEVariable private_evariable(const BinaryMechanism& mech,
                                          const HypothesisPair& pair) {
  return private_evariable_from_marginals(mech, marginals(mech, pair));
}

inline GrowthReport growth_rate(const PrivateEVariable& ev) {
  GrowthReport r;
  r.growth_rate = ev.growth();
  r.null_expectation = ev.null_expectation();
  r.extras["v0"] = ev.v0;
  r.extras["v1"] = ev.v1;
  return r;
}

// Privacy-attenuated Kelly fraction (2q - 1)(e^eps - 1)/(e^eps + 1).
inline double kelly_fraction(double q, PrivacyBudget budget) {
  if (!(q > 0.5 && q < 1.0)) {
    throw ArgumentError(str_cat("kelly fraction needs 1/2 < q < 1, got ", q));
  }
  return (2.0 * q - 1.0) * std::tanh(0.5 * budget.epsilon());
}

// 53-bit uniform in [0, 1); spelled out so trajectories are reproducible
// across standard library implementations.
inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

struct KellyConfig {
  double q_alt = 0.75;
  double q_true = 0.75;
  double epsilon = 1.0;
  std::int64_t rounds = 1;
};

// Wealth path of the privatized Kelly bettor. Wealth is kept in log space
// (it overflows a double after ~10^5 rounds at eps = 1).
struct WealthTrajectory {
  KellyConfig config;
  std::uint64_t seed = 0;
  double f_star = 0.0;
  std::vector<std::uint8_t> bits;   // Y_t, t = 1..rounds
  std::vector<double> log_wealth;   // log W_t, t = 0..rounds

  std::size_t rounds() const { return bits.size(); }
  double e_value(std::size_t round) const {
    return 1.0 + f_star * (2.0 * bits[round - 1] - 1.0);
  }
  double wealth(std::size_t round) const {
    return std::exp(log_wealth[round]);
  }
};

inline WealthTrajectory simulate_ldp_kelly(double q_true, double q_alt,
                                           PrivacyBudget budget,
                                           std::int64_t rounds,
                                           std::uint64_t seed) {
  if (rounds < 1) throw ArgumentError("rounds must be >= 1");
  if (!(q_true >= 0.0 && q_true <= 1.0)) {
    throw ArgumentError(str_cat("q_true must lie in [0,1], got ", q_true));
  }
  WealthTrajectory traj;
  traj.config = {q_alt, q_true, budget.epsilon(), rounds};
  traj.seed = seed;
  traj.f_star = kelly_fraction(q_alt, budget);
  const double flip = BinaryMechanism(0.0, budget).low();
  const double log_up = std::log1p(traj.f_star);
  const double log_down = std::log1p(-traj.f_star);
  traj.bits.reserve(static_cast<std::size_t>(rounds));
  traj.log_wealth.reserve(static_cast<std::size_t>(rounds) + 1);
  traj.log_wealth.push_back(0.0);
  std::mt19937_64 gen(seed);
  double lw = 0.0;
  for (std::int64_t r = 0; r < rounds; ++r) {
    const int x = uniform01(gen) < q_true ? 1 : 0;
    const int y = uniform01(gen) < flip ? 1 - x : x;
    lw += y == 1 ? log_up : log_down;
    traj.bits.push_back(static_cast<std::uint8_t>(y));
    traj.log_wealth.push_back(lw);
  }
  return traj;
}

// Output bit of the mechanism driven by an external uniform u:
//   1{L >  t, u < e^eps/(1+e^eps)} + 1{L <= t, u < 1/(1+e^eps)}.
inline int privatized_bit(const BinaryMechanism& mech, double lr, double u) {
  const bool above = lr > mech.threshold();
  return ((above && u < mech.high()) || (!above && u < mech.low())) ? 1 : 0;
}

// E as a randomized transform of the unconstrained likelihood ratio L(x).
inline double randomized_postprocess(const HypothesisPair& pair,
                                     const PrivateEVariable& ev, double x,
                                     double u) {
  return ev.value(privatized_bit(ev.mechanism, pair.likelihood_ratio(x), u));
}

}  // namespace evar

#endif  // EVAR_LDP_HPP_
