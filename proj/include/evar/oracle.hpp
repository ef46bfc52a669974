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

#ifndef EVAR_ORACLE_HPP_
#define EVAR_ORACLE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "evar/core.hpp"
#include "evar/distribution.hpp"

// Brute-force references. Slow and obviously correct; nothing here calls
// into the solvers (ldp.hpp, constraints.hpp).
namespace evar::oracle {

struct OracleResult {
  double best_value = -std::numeric_limits<double>::infinity();
  std::string best_config;
  std::uint64_t evaluations = 0;
  // Grid indices of the best subset (subset searches), relabeled so it is
  // the set carrying the larger alternative-to-null mass ratio.
  std::vector<std::size_t> best_set;
  // Dual lattice searches: multipliers of the best feasible cell.
  double best_lambda = std::numeric_limits<double>::quiet_NaN();
  double best_gamma = std::numeric_limits<double>::quiet_NaN();
  bool feasible = true;
};

inline constexpr std::size_t kMaxSubsetSupport = 20;
inline constexpr std::size_t kMaxDualSupport = 50;

namespace detail {

inline double plogpq(double p, double q) {
  return p > 0.0 ? p * std::log(p / q) : 0.0;
}

inline void check_subset_pair(const HypothesisPair& pair) {
  if (pair.is_continuous()) {
    throw ArgumentError("subset oracles need a discrete pair");
  }
  if (pair.size() > kMaxSubsetSupport) {
    throw ArgumentError(str_cat("subset oracle refused: support size ",
                                pair.size(), " exceeds ", kMaxSubsetSupport));
  }
}

inline std::vector<std::size_t> members_of(std::uint64_t mask, std::size_t n) {
  std::vector<std::size_t> s;
  for (std::size_t i = 0; i < n; ++i) {
    if (mask >> i & 1u) s.push_back(i);
  }
  return s;
}

inline std::string describe_set(const std::vector<std::size_t>& s) {
  std::string out = "{";
  for (std::size_t k = 0; k < s.size(); ++k) {
    out += (k ? "," : "") + std::to_string(s[k]);
  }
  return out + "}";
}

// Canonical orientation: the set with P1(S)/P0(S) >= P1(S^c)/P0(S^c).
inline std::uint64_t orient(std::uint64_t mask, const HypothesisPair& pair) {
  const std::size_t n = pair.size();
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (mask >> i & 1u) {
      a += pair.null_mass()[i];
      b += pair.alt_mass()[i];
    }
  }
  // b/a >= (1-b)/(1-a)  <=>  b >= a
  if (b >= a) return mask;
  return ~mask & ((std::uint64_t{1} << n) - 1);
}

}  // namespace detail

// True when S = {L > t} for some t, i.e. every L in S exceeds every L
// outside S.
inline bool is_level_set(const HypothesisPair& pair,
                         const std::vector<std::size_t>& set) {
  std::vector<bool> in(pair.size(), false);
  for (std::size_t i : set) in[i] = true;
  double min_in = std::numeric_limits<double>::infinity();
  double max_out = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pair.size(); ++i) {
    if (in[i]) {
      min_in = std::min(min_in, pair.lr()[i]);
    } else {
      max_out = std::max(max_out, pair.lr()[i]);
    }
  }
  return min_in > max_out;
}

// Exhausts all 2^n high/low assignments of an epsilon-LDP binary channel
// (the extreme points of the feasible set) and returns the best
// d(Ber(m1) || Ber(m0)).
inline OracleResult brute_force_binary_mechanism(const HypothesisPair& pair,
                                                 double epsilon) {
  detail::check_subset_pair(pair);
  if (!(epsilon > 0.0)) throw ArgumentError("epsilon must be positive");
  const std::size_t n = pair.size();
  const double lo = 1.0 / (1.0 + std::exp(epsilon));
  const double hi = std::exp(epsilon) / (1.0 + std::exp(epsilon));
  OracleResult r;
  std::uint64_t best_mask = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    double m0 = 0.0, m1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double q = (mask >> i & 1u) ? hi : lo;
      m0 += pair.null_mass()[i] * q;
      m1 += pair.alt_mass()[i] * q;
    }
    const double j =
        detail::plogpq(m1, m0) + detail::plogpq(1.0 - m1, 1.0 - m0);
    ++r.evaluations;
    if (j > r.best_value) {
      r.best_value = j;
      best_mask = mask;
    }
  }
  best_mask = detail::orient(best_mask, pair);
  r.best_set = detail::members_of(best_mask, n);
  r.best_config = "high-output set " + detail::describe_set(r.best_set);
  return r;
}

// All 2^n sets S with the conditionally optimal values u1 = beta/alpha,
// u0 = (1-beta)/(1-alpha); alpha in {0, 1} is the constant e-variable.
inline OracleResult brute_force_quantizer(const HypothesisPair& pair) {
  detail::check_subset_pair(pair);
  const std::size_t n = pair.size();
  OracleResult r;
  std::uint64_t best_mask = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    double alpha = 0.0, beta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1u) {
        alpha += pair.null_mass()[i];
        beta += pair.alt_mass()[i];
      }
    }
    double g = 0.0;
    if (alpha > 0.0 && alpha < 1.0) {
      g = 0.0;
      if (beta > 0.0) g += beta * std::log(beta / alpha);
      if (beta < 1.0) g += (1.0 - beta) * std::log((1.0 - beta) / (1.0 - alpha));
    }
    ++r.evaluations;
    if (g > r.best_value) {
      r.best_value = g;
      best_mask = mask;
    }
  }
  best_mask = detail::orient(best_mask, pair);
  r.best_set = detail::members_of(best_mask, n);
  r.best_config = "u1 set " + detail::describe_set(r.best_set);
  return r;
}

struct DualLatticeOptions {
  int lattice = 400;         // coarse lattice is lattice x lattice
  int refine_lattice = 41;   // gamma points per zoom round
  int refine_levels = 60;    // cap on zoom rounds
  double refine_width = 1e-13;  // stop once the window is this narrow
  double feasibility_slack = 1e-12;
};

namespace detail {

// argmax_{e >= 0} l log e - lambda e - gamma phi(e) via bisection of the
// derivative l/e - lambda - gamma phi'(e) on a geometric bracket.
template <typename Deriv>
double lagrangian_argmax(double l, double lambda, double gamma,
                         const Deriv& dphi) {
  if (gamma == 0.0) {
    return lambda > 0.0 ? l / lambda : std::numeric_limits<double>::infinity();
  }
  auto slope = [&](double e) { return l / e - lambda - gamma * dphi(e); };
  double a = 1.0, b = 1.0;
  if (slope(1.0) > 0.0) {
    do {
      a = b;
      b *= 4.0;
    } while (slope(b) > 0.0 && b < 1e300);
  } else {
    do {
      b = a;
      a *= 0.25;
    } while (slope(a) <= 0.0 && a > 1e-300);
    if (slope(a) <= 0.0) return 0.0;
  }
  while (b > a * (1.0 + 1e-15)) {
    const double m = std::sqrt(a * b);
    if (m <= a || m >= b) break;
    (slope(m) > 0.0 ? a : b) = m;
  }
  return std::sqrt(a * b);
}

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

}  // namespace detail

// Best feasible growth over Lagrangian maximizers e(lambda, gamma) on a
// lattice of multipliers: a coarse signed-log x log lattice, then zooms in
// gamma along the profile of the smallest feasible lambda.
template <typename Phi, typename DPhi>
OracleResult grid_dual_oracle(const HypothesisPair& pair, const Phi& phi,
                              const DPhi& dphi, double budget,
                              const DualLatticeOptions& opts = {}) {
  if (pair.is_continuous()) {
    throw ArgumentError("grid_dual_oracle needs a discrete pair");
  }
  if (pair.size() > kMaxDualSupport) {
    throw ArgumentError(str_cat("grid_dual_oracle refused: support size ",
                                pair.size(), " exceeds ", kMaxDualSupport));
  }
  const std::size_t n = pair.size();
  OracleResult r;
  r.feasible = false;
  std::vector<double> e(n);

  auto evaluate = [&](double lambda, double gamma) -> void {
    ++r.evaluations;
    double mean = 0.0, pen = 0.0, growth = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      e[i] = detail::lagrangian_argmax(pair.lr()[i], lambda, gamma, dphi);
      if (!std::isfinite(e[i])) return;
      mean += pair.null_mass()[i] * e[i];
      if (mean > 1.0 + opts.feasibility_slack) return;
      pen += pair.null_mass()[i] * phi(e[i]);
      if (pair.alt_mass()[i] > 0.0) {
        if (e[i] <= 0.0) return;
        growth += pair.alt_mass()[i] * std::log(e[i]);
      }
    }
    if (mean > 1.0 + opts.feasibility_slack ||
        pen > budget + opts.feasibility_slack) {
      return;
    }
    if (growth > r.best_value) {
      r.best_value = growth;
      r.best_lambda = lambda;
      r.best_gamma = gamma;
      r.feasible = true;
    }
  };

  // Coarse lattice. lambda: 0 and +-10^k, k in [-4, 3]; gamma: 0 and
  // 10^k, k in [-6, 4].
  const int half = opts.lattice / 2;
  std::vector<double> lambdas, gammas{0.0};
  for (int i = half - 1; i >= 0; --i) {
    lambdas.push_back(-std::pow(10.0, -4.0 + 7.0 * i / (half - 1)));
  }
  lambdas.push_back(0.0);
  for (int i = 0; i < opts.lattice - half - 1; ++i) {
    lambdas.push_back(
        std::pow(10.0, -4.0 + 7.0 * i / (opts.lattice - half - 2)));
  }
  for (int i = 0; i < opts.lattice - 1; ++i) {
    gammas.push_back(std::pow(10.0, -6.0 + 10.0 * i / (opts.lattice - 2)));
  }
  for (double l : lambdas) {
    for (double g : gammas) evaluate(l, g);
  }

  // Refine along the profile lambda(gamma): the smallest lambda meeting
  // both constraints. e falls in lambda, so at fixed gamma growth does too.
  // For a penalty that is not monotone in e the profile point is still
  // feasible, just not necessarily best.
  auto constraints = [&](double lambda, double gamma) {
    double mean = 0.0, pen = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = detail::lagrangian_argmax(pair.lr()[i], lambda, gamma,
                                                 dphi);
      if (!std::isfinite(v)) {
        const double inf = std::numeric_limits<double>::infinity();
        return std::pair{inf, inf};
      }
      mean += pair.null_mass()[i] * v;
      pen += pair.null_mass()[i] * phi(v);
    }
    return std::pair{mean, pen};
  };
  // Smallest lambda > lo with bad(lambda) false, given bad(lo).
  auto first_good = [&](double lo, auto&& bad) {
    double step = std::max(1.0, std::abs(lo)), hi = lo + step;
    while (bad(hi)) {
      if (step > 1e12) return std::numeric_limits<double>::quiet_NaN();
      step *= 2.0;
      hi = lo + step;
    }
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi ||
          hi - lo <= 1e-15 * std::max(1.0, std::abs(hi))) {
        break;
      }
      (bad(mid) ? lo : hi) = mid;
    }
    return hi;
  };
  auto profile = [&](double gamma) {
    auto mean_bad = [&](double l) { return constraints(l, gamma).first > 1.0; };
    double lo = -1.0;
    while (!mean_bad(lo) && lo > -1e12) lo *= 2.0;
    double lambda = mean_bad(lo) ? first_good(lo, mean_bad) : lo;
    if (!std::isfinite(lambda)) return;
    auto pen_bad = [&](double l) {
      return constraints(l, gamma).second > budget;
    };
    if (pen_bad(lambda)) lambda = first_good(lambda, pen_bad);
    if (std::isfinite(lambda)) evaluate(lambda, gamma);
  };
  for (double g : gammas) profile(g);
  if (r.feasible) {
    const auto it = std::lower_bound(gammas.begin(), gammas.end(), r.best_gamma);
    const std::ptrdiff_t k = it - gammas.begin();
    const std::ptrdiff_t last = static_cast<std::ptrdiff_t>(gammas.size()) - 1;
    double lo = gammas[std::max<std::ptrdiff_t>(0, k - 2)];
    double hi = gammas[std::min<std::ptrdiff_t>(last, k + 2)];
    const int m = std::max(opts.refine_lattice, 5);
    for (int level = 0; level < opts.refine_levels; ++level) {
      const auto gs = detail::linspace(lo, hi, m);
      for (double g : gs) profile(g);
      const double step = (hi - lo) / (m - 1);
      lo = std::max(0.0, r.best_gamma - 2.0 * step);
      hi = r.best_gamma + 2.0 * step;
      if (hi - lo <= opts.refine_width * std::max(1e-300, r.best_gamma)) break;
    }
  }
  r.best_config = r.feasible ? str_cat("lambda=", r.best_lambda,
                                       " gamma=", r.best_gamma)
                             : "no feasible lattice point";
  return r;
}

}  // namespace evar::oracle

#endif  // EVAR_ORACLE_HPP_
