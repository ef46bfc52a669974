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

#ifndef EVAR_CONSTRAINTS_HPP_
#define EVAR_CONSTRAINTS_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "evar/core.hpp"
#include "evar/distribution.hpp"
#include "evar/ldp.hpp"
#include "evar/numeric.hpp"

namespace evar {


// The unconstrained log-optimal e-variable E = L.
struct LikelihoodRatioEVariable {
  double operator()(double lr) const { return lr; }
  static constexpr const char* kind() { return "identity"; }
};

// ---------------------------------------------------------------------------
// Two-level quantization.

// E = u1 on {L > t*}, u0 on {L <= t*}.
struct TwoLevelEVariable {
  double t_star = 1.0;
  double u0 = 1.0;
  double u1 = 1.0;
  double alpha = 0.0;  // P0(L > t*)
  double beta = 0.0;   // P1(L > t*)
  double growth = 0.0;
  // |t* - (u1 - u0)/(log u1 - log u0)|; may be nonzero for atoms.
  double residual = 0.0;
  bool interior = false;
  bool degenerate = false;  // P0 = P1, E = 1
  std::string method;
  std::vector<double> optimal_thresholds;

  double operator()(double lr) const { return lr > t_star ? u1 : u0; }
  static constexpr const char* kind() { return "quantize"; }
};

// (u1 - u0)/(log u1 - log u0), with the u1 == u0 limit.
inline double quantizer_threshold_map(double u0, double u1) {
  if (u1 == u0) return u0;
  return (u1 - u0) / (std::log(u1) - std::log(u0));
}

struct QuantizeOptions {
  Tolerances tol;
  int scan_points = 512;  // continuous cross-check grid
  double tie_tolerance = 1e-15;
};

inline TwoLevelEVariable solve_quantized(const HypothesisPair& pair,
                                         const QuantizeOptions& opts = {}) {
  TwoLevelEVariable ev;
  if (pair.identical()) {
    ev.degenerate = true;
    ev.method = "degenerate";
    ev.optimal_thresholds = {1.0};
    return ev;
  }
  const detail::LevelSets sets(pair);
  const auto levels = sets.levels();

  auto fill = [&](TwoLevelEVariable& e, double alpha, double beta) {
    e.alpha = alpha;
    e.beta = beta;
    if (alpha <= 0.0 || alpha >= 1.0) {
      e.u0 = e.u1 = 1.0;
      e.growth = 0.0;
      return;
    }
    e.u1 = beta / alpha;
    e.u0 = (1.0 - beta) / (1.0 - alpha);
    e.growth = xlogxy(beta, alpha) + xlogxy(1.0 - beta, 1.0 - alpha);
  };
  auto growth_at = [&](double t) {
    TwoLevelEVariable e;
    const auto [a, b] = sets.tail_at(t);
    fill(e, a, b);
    return e.growth;
  };
  auto map_at = [&](double t) {
    TwoLevelEVariable e;
    const auto [a, b] = sets.tail_at(t);
    fill(e, a, b);
    return quantizer_threshold_map(e.u0, e.u1);
  };
  auto finish = [&](double t) {
    ev.t_star = t;
    const auto [a, b] = sets.tail_at(t);
    fill(ev, a, b);
    ev.residual = std::abs(t - quantizer_threshold_map(ev.u0, ev.u1));
  };

  std::vector<double> g(levels.size());
  std::size_t best = 0;
  for (std::size_t j = 0; j < levels.size(); ++j) {
    TwoLevelEVariable e;
    fill(e, sets.tail0(j), sets.tail1(j));
    g[j] = e.growth;
    if (g[j] > g[best]) best = j;
  }
  auto take_enumeration = [&]() {
    ev.method = "enumeration";
    ev.optimal_thresholds.clear();
    for (std::size_t j = 0; j < levels.size(); ++j) {
      if (g[j] >= g[best] * (1.0 - opts.tie_tolerance)) {
        ev.optimal_thresholds.push_back(levels[j]);
      }
    }
    const double rhs = map_at(levels[best]);
    const double upper = best + 1 < levels.size()
                             ? levels[best + 1]
                             : std::numeric_limits<double>::infinity();
    ev.interior = rhs >= levels[best] && rhs < upper;
    finish(ev.interior ? rhs : levels[best]);
    return ev;
  };
  if (!pair.is_continuous()) return take_enumeration();

  // Continuous: damped fixed point, cross-checked by a log-spaced scan.
  const Tolerances& tol = opts.tol;
  double t = 1.0;
  bool converged = false;
  for (int it = 0; it < tol.fixed_point_max_iter; ++it) {
    const double rhs = map_at(t);
    if (!std::isfinite(rhs) || rhs <= 0.0) break;
    const double next =
        (1.0 - tol.fixed_point_damping) * t + tol.fixed_point_damping * rhs;
    if (std::abs(next - t) <= tol.fixed_point * std::max(1.0, t)) {
      t = next;
      converged = true;
      break;
    }
    t = next;
  }
  const double l_lo =
      *std::upper_bound(levels.begin(), levels.end(), 0.0);
  const double l_hi = levels.back();
  double t_scan = l_lo;
  double g_scan = -1.0;
  const int n = std::max(opts.scan_points, 2);
  for (int i = 0; i < n; ++i) {
    const double s = std::log(l_lo) +
                     (std::log(l_hi) - std::log(l_lo)) * i / (n - 1);
    const double g = growth_at(std::exp(s));
    if (g > g_scan) {
      g_scan = g;
      t_scan = std::exp(s);
    }
  }
  const double g_fp = converged ? growth_at(t) : -1.0;
  if (g[best] > std::max(g_fp, g_scan)) return take_enumeration();
  if (converged && g_fp >= g_scan) {
    ev.method = "fixed-point";
    const double rhs = map_at(t);
    finish(sets.piece_of(rhs) == sets.piece_of(t) ? rhs : t);
  } else {
    ev.method = "scan";
    finish(t_scan);
  }
  ev.interior = ev.residual <= 1e-8;
  ev.optimal_thresholds = {ev.t_star};
  return ev;
}

// ---------------------------------------------------------------------------
// Boundedness: E = min(c2, max(c1, L / lambda*)).

struct ClippedEVariable {
  double c1 = 0.0;
  double c2 = 1.0;
  double lambda_star = 1.0;
  double null_expectation = 1.0;

  double operator()(double lr) const {
    return std::min(c2, std::max(c1, lr / lambda_star));
  }
  static constexpr const char* kind() { return "clip"; }
};

inline ClippedEVariable solve_bounded(const HypothesisPair& pair, double c1,
                                      double c2,
                                      const Tolerances& tol = {}) {
  if (!(c1 >= 0.0) || !(c2 < std::numeric_limits<double>::infinity())) {
    throw ArgumentError(str_cat("clip bounds need 0 <= c1 and finite c2, got ",
                                c1, ", ", c2));
  }
  if (c1 > 1.0 || c2 < 1.0) {
    throw InfeasibleError(str_cat("clip bounds need c1 <= 1 <= c2, got c1 = ",
                                  c1, ", c2 = ", c2));
  }
  ClippedEVariable ev{c1, c2, 1.0, 1.0};
  if (c1 == 1.0 && c2 == 1.0) return ev;

  auto excess = [&](double lambda) {
    ClippedEVariable e{c1, c2, lambda, 0.0};
    double s = 0.0;
    for (std::size_t i = 0; i < pair.size(); ++i) {
      s += pair.null_mass()[i] * e(pair.lr()[i]);
    }
    return s - 1.0;
  };
  // Non-increasing in lambda; bracket by doubling away from 1.
  double lo = 1.0, hi = 1.0;
  const double h1 = excess(1.0);
  if (h1 == 0.0) {
    ev.null_expectation = 1.0;
    return ev;
  }
  bool bracketed = false;
  if (h1 > 0.0) {
    for (int i = 0; i < tol.bracket_max_doublings && !bracketed; ++i) {
      lo = hi;
      hi *= 2.0;
      bracketed = excess(hi) <= 0.0;
    }
  } else {
    for (int i = 0; i < tol.bracket_max_doublings && !bracketed; ++i) {
      hi = lo;
      lo *= 0.5;
      bracketed = excess(lo) >= 0.0;
    }
    if (!bracketed) {
      // Every positive-L point already sits at c2; no scaling reaches the
      // budget and the clipped cap is optimal.
      ev.lambda_star = lo;
      ev.null_expectation = 1.0 + excess(lo);
      return ev;
    }
  }
  if (!bracketed) {
    throw SolverError("clip: could not bracket lambda*", hi, excess(hi));
  }
  ev.lambda_star = detail::bisect(excess, lo, hi, tol.bisection_max_iter);
  ev.null_expectation = 1.0 + excess(ev.lambda_star);
  return ev;
}

// ---------------------------------------------------------------------------
// Convex integral constraints E_P0[phi(E)] <= C.

// Strictly convex, superlinear penalty on (0, inf) with its derivative.
struct ConvexPenalty {
  std::string name;
  std::function<double(double)> eval;
  std::function<double(double)> deriv;

  static ConvexPenalty square() {
    return {"square", [](double x) { return x * x; },
            [](double x) { return 2.0 * x; }};
  }
  // x log x, extended by 0 at x = 0.
  static ConvexPenalty xlogx() {
    return {"xlogx", [](double x) { return x > 0.0 ? x * std::log(x) : 0.0; },
            [](double x) { return std::log(x) + 1.0; }};
  }
  // x^p, p > 1.
  static ConvexPenalty power(double p) {
    if (!(p > 1.0)) {
      throw ArgumentError(str_cat("power penalty needs p > 1, got ", p));
    }
    return {str_cat("power:", p), [p](double x) { return std::pow(x, p); },
            [p](double x) { return p * std::pow(x, p - 1.0); }};
  }
  static ConvexPenalty by_name(const std::string& name) {
    if (name == "square") return square();
    if (name == "xlogx") return xlogx();
    if (name.rfind("power:", 0) == 0) return power(std::stod(name.substr(6)));
    throw ArgumentError(str_cat("unknown penalty '", name,
                                "' (expected square, xlogx or power:<p>)"));
  }
};

// Finite-difference spot checks on a log-spaced grid: phi' strictly
// increasing, consistent with phi, and phi(x)/x increasing past a knee.
inline void check_penalty(const ConvexPenalty& penalty) {
  constexpr int kPoints = 61;
  double prev_d = -std::numeric_limits<double>::infinity();
  std::vector<double> ratio;
  for (int i = 0; i < kPoints; ++i) {
    const double x = std::pow(10.0, -3.0 + 6.0 * i / (kPoints - 1));
    const double d = penalty.deriv(x);
    if (!std::isfinite(d) || !(d > prev_d)) {
      throw ArgumentError(str_cat("penalty '", penalty.name,
                                  "': derivative not strictly increasing at x = ",
                                  x));
    }
    prev_d = d;
    const double h = 1e-5 * x;
    const double fd = (penalty.eval(x + h) - penalty.eval(x - h)) / (2.0 * h);
    if (std::abs(fd - d) > 1e-4 * std::max(1.0, std::abs(d))) {
      throw ArgumentError(str_cat("penalty '", penalty.name,
                                  "': derivative disagrees with finite "
                                  "difference at x = ",
                                  x));
    }
    ratio.push_back(penalty.eval(x) / x);
  }
  for (int i = 2 * kPoints / 3; i + 1 < kPoints; ++i) {
    if (!(ratio[i + 1] > ratio[i])) {
      throw ArgumentError(
          str_cat("penalty '", penalty.name, "' does not look superlinear"));
    }
  }
}

// argmax_{e >= 0} l log e - lambda e - gamma phi(e), i.e. the root of the
// strictly decreasing residual l/e - lambda - gamma phi'(e), found by
// bisection in log space; 0 when the residual is already negative at 0+.
inline double convex_pointwise(double l, double lambda, double gamma,
                               const ConvexPenalty& penalty) {
  if (gamma == 0.0) {
    if (!(lambda > 0.0)) {
      throw SolverError("pointwise problem unbounded (gamma = 0, lambda <= 0)",
                        lambda, std::numeric_limits<double>::infinity());
    }
    return l / lambda;
  }
  auto r = [&](double e) { return l / e - lambda - gamma * penalty.deriv(e); };
  double lo = 1.0, hi = 1.0;
  if (r(1.0) > 0.0) {
    while (r(hi) > 0.0) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e300) return hi;
    }
  } else {
    while (r(lo) <= 0.0) {
      hi = lo;
      lo *= 0.5;
      if (lo < 1e-300) return 0.0;
    }
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = std::sqrt(lo) * std::sqrt(hi);
    if (mid <= lo || mid >= hi) break;
    if (r(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::sqrt(lo) * std::sqrt(hi);
}

// Closed form for phi = x^2: (sqrt(lambda^2 + 8 gamma l) - lambda)/(4 gamma).
inline double square_pointwise(double l, double lambda, double gamma) {
  if (gamma == 0.0) return l / lambda;
  const double root = std::sqrt(lambda * lambda + 8.0 * gamma * l);
  // Rationalized form avoids cancellation when lambda > 0.
  if (lambda > 0.0) return 2.0 * l / (root + lambda);
  return (root - lambda) / (4.0 * gamma);
}

struct ConvexConstrainedEVariable {
  double lambda = 1.0;
  double gamma = 0.0;
  ConvexPenalty penalty = ConvexPenalty::square();
  double budget = 0.0;  // C
  bool closed_form = false;
  // Constraint values at the solution.
  double null_expectation = 1.0;
  double null_penalty = 0.0;
  std::string active_set;  // "none", "penalty", "both"

  double operator()(double lr) const {
    if (closed_form) return square_pointwise(lr, lambda, gamma);
    return convex_pointwise(lr, lambda, gamma, penalty);
  }
  // |L/E - lambda - gamma phi'(E)|; 0 at boundary points E = 0.
  double kkt_residual(double lr) const {
    const double e = (*this)(lr);
    if (e <= 0.0) return 0.0;
    return std::abs(lr / e - lambda - gamma * penalty.deriv(e));
  }
  static constexpr const char* kind() { return "convex"; }
};

namespace detail {

struct ConvexDualProblem {
  const HypothesisPair& pair;
  const ConvexPenalty& penalty;
  double budget;
  bool closed_form;
  const Tolerances& tol;

  double point(double l, double lambda, double gamma) const {
    return closed_form ? square_pointwise(l, lambda, gamma)
                       : convex_pointwise(l, lambda, gamma, penalty);
  }
  // (E_P0[e], E_P0[phi(e)])
  std::pair<double, double> moments(double lambda, double gamma) const {
    double m = 0.0, p = 0.0;
    for (std::size_t i = 0; i < pair.size(); ++i) {
      const double w = pair.null_mass()[i];
      const double e = point(pair.lr()[i], lambda, gamma);
      m += w * e;
      p += w * penalty.eval(e);
    }
    return {m, p};
  }

  // lambda with E_P0[e(lambda, gamma)] = 1 (decreasing in lambda).
  double lambda_for(double gamma) const {
    auto f = [&](double lambda) { return moments(lambda, gamma).first - 1.0; };
    double lo = 0.0, hi = 0.0, step = 1.0;
    if (f(0.0) > 0.0) {
      for (int i = 0; i < tol.bracket_max_doublings; ++i, step *= 2.0) {
        lo = hi;
        hi = step;
        if (f(hi) <= 0.0) return bisect(f, lo, hi, tol.bisection_max_iter);
      }
    } else {
      for (int i = 0; i < tol.bracket_max_doublings; ++i, step *= 2.0) {
        hi = lo;
        lo = -step;
        if (f(lo) >= 0.0) return bisect(f, lo, hi, tol.bisection_max_iter);
      }
    }
    throw SolverError(str_cat("convex dual: no budget bracket for gamma = ",
                              gamma),
                      gamma, f(lo));
  }

  // Root in log(gamma) of a function decreasing in gamma; scans a wide
  // log grid when doubling from gamma = 1 fails to show the expected signs.
  template <typename H>
  double gamma_root(H&& h) const {
    auto hs = [&](double s) { return h(std::exp(s)); };
    double lo = 0.0, hi = 0.0;
    bool ok = false;
    const double h0 = hs(0.0);
    if (h0 > 0.0) {
      for (int i = 0; i < tol.bracket_max_doublings && !ok; ++i) {
        lo = hi;
        hi += std::log(2.0);
        ok = hs(hi) <= 0.0;
      }
    } else {
      for (int i = 0; i < tol.bracket_max_doublings && !ok; ++i) {
        hi = lo;
        lo -= std::log(2.0);
        ok = hs(lo) >= 0.0;
      }
    }
    if (!ok) {
      // Monotonicity fallback: look for any sign change on a coarse grid.
      constexpr int kScan = 200;
      double prev_s = -40.0, prev_h = hs(prev_s);
      for (int i = 1; i <= kScan && !ok; ++i) {
        const double s = -40.0 + 80.0 * i / kScan;
        const double hv = hs(s);
        if (prev_h > 0.0 && hv <= 0.0) {
          lo = prev_s;
          hi = s;
          ok = true;
        }
        prev_s = s;
        prev_h = hv;
      }
    }
    if (!ok) {
      throw SolverError("convex dual: penalty constraint could not be "
                        "bracketed in gamma",
                        std::exp(lo), hs(lo));
    }
    return std::exp(bisect(hs, lo, hi, tol.bisection_max_iter));
  }
};

inline ConvexConstrainedEVariable solve_convex_dual(
    const HypothesisPair& pair, const ConvexPenalty& penalty, double budget,
    bool closed_form, const Tolerances& tol) {
  // Feasibility floor: some constant e <= 1 with phi(e) <= C.
  double floor = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 400; ++i) {
    floor = std::min(floor, penalty.eval(std::pow(10.0, -12.0 + 12.0 * i / 400)));
  }
  if (!(budget >= floor) || (closed_form && budget <= 0.0)) {
    throw InfeasibleError(str_cat("penalty budget C = ", budget,
                                  " is below the feasibility floor ", floor));
  }
  ConvexConstrainedEVariable ev;
  ev.penalty = penalty;
  ev.budget = budget;
  ev.closed_form = closed_form;
  const ConvexDualProblem dual{pair, penalty, budget, closed_form, tol};

  auto finish = [&](double lambda, double gamma, const char* active) {
    ev.lambda = lambda;
    ev.gamma = gamma;
    ev.active_set = active;
    const auto [m, p] = dual.moments(lambda, gamma);
    ev.null_expectation = m;
    ev.null_penalty = p;
    return ev;
  };

  // Penalty inactive: E = L.
  if (dual.moments(1.0, 0.0).second <= budget) return finish(1.0, 0.0, "none");

  // Budget slack (lambda = 0), penalty tight.
  const double gamma_slack = dual.gamma_root(
      [&](double g) { return dual.moments(0.0, g).second - budget; });
  if (dual.moments(0.0, gamma_slack).first <= 1.0) {
    return finish(0.0, gamma_slack, "penalty");
  }

  // Both tight.
  const double gamma = dual.gamma_root([&](double g) {
    return dual.moments(dual.lambda_for(g), g).second - budget;
  });
  const double lambda = dual.lambda_for(gamma);
  if (lambda < -1e-9) {
    throw SolverError("convex dual: negative budget multiplier", lambda,
                      dual.moments(lambda, gamma).first - 1.0);
  }
  return finish(lambda, gamma, "both");
}

}  // namespace detail

// E_P0[E^2] <= C through the closed-form pointwise maximizer.
inline ConvexConstrainedEVariable solve_moment(const HypothesisPair& pair,
                                               double budget,
                                               const Tolerances& tol = {}) {
  return detail::solve_convex_dual(pair, ConvexPenalty::square(), budget,
                                   /*closed_form=*/true, tol);
}

// General strictly convex superlinear penalty; pointwise maximizer by
// safeguarded scalar root finding.
inline ConvexConstrainedEVariable solve_convex(const HypothesisPair& pair,
                                               const ConvexPenalty& penalty,
                                               double budget,
                                               const Tolerances& tol = {}) {
  check_penalty(penalty);
  return detail::solve_convex_dual(pair, penalty, budget,
                                   /*closed_form=*/false, tol);
}

// ---------------------------------------------------------------------------

// Values of a pointwise e-variable on the pair's grid.
template <typename EVariable>
std::vector<double> values_on_grid(const EVariable& ev,
                                   const HypothesisPair& pair) {
  std::vector<double> v(pair.size());
  for (std::size_t i = 0; i < pair.size(); ++i) v[i] = ev(pair.lr()[i]);
  return v;
}

template <typename EVariable>
GrowthReport growth_rate(const EVariable& ev, const HypothesisPair& pair) {
  const std::vector<double> v = values_on_grid(ev, pair);
  GrowthReport r = growth_of_values(pair, v);
  if constexpr (requires { ev.penalty; }) {
    std::vector<double> phi(v.size());
    std::vector<double> sq(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      phi[i] = ev.penalty.eval(v[i]);
      sq[i] = v[i] * v[i];
    }
    r.extras["null_penalty"] = pair.null_sum(phi);
    r.extras["null_second_moment"] = pair.null_sum(sq);
  }
  return r;
}

}  // namespace evar

#endif  // EVAR_CONSTRAINTS_HPP_
