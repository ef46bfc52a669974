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

#ifndef EVAR_COUNTEREXAMPLE_HPP_
#define EVAR_COUNTEREXAMPLE_HPP_

#include <algorithm>
#include <cmath>

#include "evar/core.hpp"
#include "evar/numeric.hpp"
#include "evar/quadrature.hpp"

// Bounded-mean null {P : E_P[X] <= mu} on [0, 1] against Q = Uniform(0, 1),
// where no LFD exists. Clipping the numeraire 1 + lambda*(X - mu) at c is
// beaten by re-optimizing lambda under the clip.
namespace evar::counterexample {

inline constexpr double kSingularityGuard = 1e-9;

struct Config {
  double mu = 0.25;
  double c = 3.0;
  int nodes = kDefaultQuadratureNodes;
};

struct Verdict {
  double lambda_star = 0.0;
  double lambda_star_residual = 0.0;  // first-order integral at lambda*
  double lambda_new = 0.0;
  double growth_estar = 0.0;   // J_con(lambda*)
  double growth_eprime = 0.0;  // J_con(lambda_new)
  double gap = 0.0;
  double grad_at_star = 0.0;   // J_con'(lambda*)
  double z_c_star = 0.0;
  bool hypothesis_holds = false;  // mu + (c-1)/lambda* < 1
  bool invariants_hold = false;   // gap > 0, lambda_new < lambda*, grad < 0
};

inline void check_mu(double mu) {
  if (!(mu > 0.0 && mu < 0.5)) {
    throw ArgumentError(str_cat("mu must lie in (0, 1/2), got ", mu));
  }
}

inline double lambda_upper(double mu) { return 1.0 / mu - kSingularityGuard; }

// E_Q[log(1 + lambda (X - mu))].
inline double unconstrained_growth(double lambda, double mu,
                                   int nodes = kDefaultQuadratureNodes) {
  if (lambda == 0.0) return 0.0;
  return integrate([&](double z) { return std::log1p(lambda * (z - mu)); },
                   0.0, 1.0, nodes);
}

// d/dlambda of the above: E_Q[(X - mu)/(1 + lambda (X - mu))].
inline double unconstrained_growth_derivative(
    double lambda, double mu, int nodes = kDefaultQuadratureNodes) {
  return integrate(
      [&](double z) { return (z - mu) / (1.0 + lambda * (z - mu)); }, 0.0,
      1.0, nodes);
}

// z_c(lambda) = mu + (c - 1)/lambda, clamped to [0, 1].
inline double truncation_point(double lambda, double mu, double c) {
  if (lambda <= 0.0) return 1.0;
  return std::clamp(mu + (c - 1.0) / lambda, 0.0, 1.0);
}

// J_con(lambda) = int_0^{z_c} log(1 + lambda (z - mu)) dz + (1 - z_c) log c.
inline double constrained_growth(double lambda, double mu, double c,
                                 int nodes = kDefaultQuadratureNodes) {
  if (lambda == 0.0) return 0.0;
  const double zc = truncation_point(lambda, mu, c);
  return integrate([&](double z) { return std::log1p(lambda * (z - mu)); },
                   0.0, zc, nodes) +
         (1.0 - zc) * std::log(c);
}

// J_con'(lambda): the boundary terms cancel, leaving the integral up to z_c.
inline double constrained_growth_derivative(
    double lambda, double mu, double c, int nodes = kDefaultQuadratureNodes) {
  const double zc = truncation_point(lambda, mu, c);
  return integrate(
      [&](double z) { return (z - mu) / (1.0 + lambda * (z - mu)); }, 0.0, zc,
      nodes);
}

namespace detail {

// Golden-section on a concave objective, then bisection of its (decreasing)
// derivative inside the final neighbourhood for a tight first-order root.
template <typename F, typename DF>
double maximize_concave(F&& f, DF&& df, double lo, double hi) {
  double x = evar::detail::golden_section_max(f, lo, hi, 300, 1e-14);
  const double delta = 1e-4 * (hi - lo);
  double a = std::max(lo, x - delta), b = std::min(hi, x + delta);
  if (df(a) > 0.0 && df(b) < 0.0) {
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      if (df(mid) > 0.0) {
        a = mid;
      } else {
        b = mid;
      }
    }
    x = 0.5 * (a + b);
  }
  return x;
}

}  // namespace detail

struct LambdaStar {
  double lambda = 0.0;
  double residual = 0.0;
};

// argmax_{lambda >= 0} E_Q[log(1 + lambda (X - mu))] on [0, 1/mu - 1e-9].
inline LambdaStar solve_lambda_star(double mu,
                                    int nodes = kDefaultQuadratureNodes) {
  check_mu(mu);
  LambdaStar r;
  r.lambda = detail::maximize_concave(
      [&](double l) { return unconstrained_growth(l, mu, nodes); },
      [&](double l) { return unconstrained_growth_derivative(l, mu, nodes); },
      0.0, lambda_upper(mu));
  r.residual = unconstrained_growth_derivative(r.lambda, mu, nodes);
  return r;
}

// argmax_{lambda >= 0} J_con(lambda).
inline double solve_lambda_new(double mu, double c,
                               int nodes = kDefaultQuadratureNodes) {
  check_mu(mu);
  return detail::maximize_concave(
      [&](double l) { return constrained_growth(l, mu, c, nodes); },
      [&](double l) { return constrained_growth_derivative(l, mu, c, nodes); },
      0.0, lambda_upper(mu));
}

inline Verdict verify_counterexample(const Config& cfg) {
  check_mu(cfg.mu);
  if (!(cfg.c > 1.0)) {
    throw ArgumentError(str_cat("clip level c must exceed 1, got ", cfg.c));
  }
  Verdict v;
  const LambdaStar ls = solve_lambda_star(cfg.mu, cfg.nodes);
  v.lambda_star = ls.lambda;
  v.lambda_star_residual = ls.residual;
  v.hypothesis_holds = cfg.mu + (cfg.c - 1.0) / v.lambda_star < 1.0;
  v.z_c_star = truncation_point(v.lambda_star, cfg.mu, cfg.c);
  v.lambda_new = solve_lambda_new(cfg.mu, cfg.c, cfg.nodes);
  // E* keeps lambda* with the scale gamma = 1 forced by the Dirac null at mu.
  v.growth_estar = constrained_growth(v.lambda_star, cfg.mu, cfg.c, cfg.nodes);
  v.growth_eprime = constrained_growth(v.lambda_new, cfg.mu, cfg.c, cfg.nodes);
  v.gap = v.growth_eprime - v.growth_estar;
  v.grad_at_star =
      constrained_growth_derivative(v.lambda_star, cfg.mu, cfg.c, cfg.nodes);
  v.invariants_hold =
      v.gap > 0.0 && v.lambda_new < v.lambda_star && v.grad_at_star < 0.0;
  return v;
}

// E'(x) = min(c, 1 + lambda (x - mu)).
inline double clipped_numeraire(double x, double lambda, double mu, double c) {
  return std::min(c, 1.0 + lambda * (x - mu));
}

}  // namespace evar::counterexample

#endif  // EVAR_COUNTEREXAMPLE_HPP_
