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

#ifndef EVAR_DISTRIBUTION_HPP_
#define EVAR_DISTRIBUTION_HPP_

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "evar/core.hpp"
#include "evar/quadrature.hpp"

namespace evar {

enum class DistKind { kDiscrete, kBernoulli, kGaussian, kUniform };

inline const char* to_string(DistKind kind) {
  switch (kind) {
    case DistKind::kDiscrete:
      return "discrete";
    case DistKind::kBernoulli:
      return "bernoulli";
    case DistKind::kGaussian:
      return "gaussian";
    case DistKind::kUniform:
      return "uniform";
  }
  return "unknown";
}

// Integration window for a continuous law.
struct QuadratureSpec {
  double lo = 0.0;
  double hi = 1.0;
  int nodes = kDefaultQuadratureNodes;

  void validate() const {
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
      throw ArgumentError(str_cat("quadrature window needs lo < hi, got [",
                                  lo, ", ", hi, "]"));
    }
    if (nodes < kMinQuadratureNodes) {
      throw ArgumentError(str_cat("quadrature needs at least ",
                                  kMinQuadratureNodes, " nodes, got ", nodes));
    }
  }
  bool operator==(const QuadratureSpec&) const = default;
};

// Smallest window covering both, with the finer node count.
inline QuadratureSpec window_union(const QuadratureSpec& a,
                                   const QuadratureSpec& b) {
  return {std::min(a.lo, b.lo), std::max(a.hi, b.hi),
          std::max(a.nodes, b.nodes)};
}

// Weighted point set. Every expectation in the library is a finite sum over
// atoms; continuous laws are realized through their Gauss-Legendre atoms.
struct Atoms {
  std::vector<double> x;
  std::vector<double> w;
};

// A univariate law: finite mass function or a continuous density evaluated
// through a fixed quadrature window. Immutable after construction.
class Distribution {
 public:
  static Distribution discrete(std::vector<double> support,
                               std::vector<double> probs,
                               double sum_tol = Tolerances{}.mass_sum) {
    if (support.size() != probs.size() || support.empty()) {
      throw ArgumentError(str_cat("discrete law needs matching non-empty "
                                  "support/probs, got ",
                                  support.size(), " and ", probs.size()));
    }
    std::vector<std::pair<double, double>> atoms;
    double total = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i) {
      if (!std::isfinite(support[i]) || !std::isfinite(probs[i]) ||
          probs[i] < 0.0) {
        throw ArgumentError(str_cat("invalid atom (", support[i], ", ",
                                    probs[i], ")"));
      }
      total += probs[i];
      atoms.emplace_back(support[i], probs[i]);
    }
    if (std::abs(total - 1.0) > sum_tol) {
      throw ArgumentError(
          str_cat("probabilities sum to ", total, ", expected 1"));
    }
    std::sort(atoms.begin(), atoms.end());
    Distribution d(DistKind::kDiscrete);
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (i > 0 && atoms[i].first == atoms[i - 1].first) {
        throw ArgumentError(
            str_cat("duplicate support value ", atoms[i].first));
      }
      if (atoms[i].second > 0.0) {
        d.support_.push_back(atoms[i].first);
        d.probs_.push_back(atoms[i].second);
      }
    }
    return d;
  }

  static Distribution bernoulli(double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ArgumentError(str_cat("bernoulli p must lie in [0,1], got ", p));
    }
    Distribution d(DistKind::kBernoulli);
    d.params_ = {p};
    if (p < 1.0) {
      d.support_.push_back(0.0);
      d.probs_.push_back(1.0 - p);
    }
    if (p > 0.0) {
      d.support_.push_back(1.0);
      d.probs_.push_back(p);
    }
    return d;
  }

  static Distribution gaussian(double mean, double sd,
                               std::optional<QuadratureSpec> quad = {}) {
    if (!std::isfinite(mean) || !(sd > 0.0) || !std::isfinite(sd)) {
      throw ArgumentError(
          str_cat("gaussian needs finite mean and sd > 0, got ", mean, ", ",
                  sd));
    }
    Distribution d(DistKind::kGaussian);
    d.params_ = {mean, sd};
    d.quad_ = quad.value_or(QuadratureSpec{mean - kGaussianWindowSds * sd,
                                           mean + kGaussianWindowSds * sd,
                                           kDefaultQuadratureNodes});
    d.quad_->validate();
    return d;
  }

  static Distribution uniform(double lo, double hi,
                              std::optional<QuadratureSpec> quad = {}) {
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
      throw ArgumentError(
          str_cat("uniform needs lo < hi, got [", lo, ", ", hi, "]"));
    }
    Distribution d(DistKind::kUniform);
    d.params_ = {lo, hi};
    d.quad_ = quad.value_or(QuadratureSpec{lo, hi, kDefaultQuadratureNodes});
    d.quad_->validate();
    return d;
  }

  DistKind kind() const { return kind_; }
  bool is_continuous() const {
    return kind_ == DistKind::kGaussian || kind_ == DistKind::kUniform;
  }

  // Discrete and Bernoulli laws: pruned, strictly increasing support.
  std::span<const double> support() const { return support_; }
  std::span<const double> probs() const { return probs_; }

  // Natural parameters: {p}, {mean, sd} or {lo, hi}.
  std::span<const double> params() const { return params_; }
  const QuadratureSpec& quad() const {
    if (!quad_) throw ArgumentError("discrete laws carry no quadrature");
    return *quad_;
  }

  // Probability mass at x (discrete kinds).
  double mass(double x) const {
    auto it = std::lower_bound(support_.begin(), support_.end(), x);
    if (it == support_.end() || *it != x) return 0.0;
    return probs_[it - support_.begin()];
  }

  // Lebesgue density at x (continuous kinds).
  double density(double x) const {
    switch (kind_) {
      case DistKind::kGaussian: {
        const double z = (x - params_[0]) / params_[1];
        return std::exp(-0.5 * z * z) /
               (params_[1] * std::sqrt(2.0 * std::numbers::pi));
      }
      case DistKind::kUniform:
        return (x >= params_[0] && x <= params_[1])
                   ? 1.0 / (params_[1] - params_[0])
                   : 0.0;
      default:
        throw ArgumentError("density() is only defined for continuous laws");
    }
  }

  // Support points with masses; for continuous laws the normalized
  // quadrature atoms of the own window.
  Atoms atoms() const {
    if (!is_continuous()) return {support_, probs_};
    return atoms_on(*quad_);
  }

  // Quadrature atoms of a continuous law on an arbitrary window. Masses are
  // w_i * density(x_i), renormalized to sum to one.
  Atoms atoms_on(const QuadratureSpec& window) const {
    if (!is_continuous()) {
      throw ArgumentError("atoms_on() needs a continuous law");
    }
    window.validate();
    GaussLegendreRule rule =
        gauss_legendre(window.nodes, window.lo, window.hi);
    Atoms a{std::move(rule.nodes), std::move(rule.weights)};
    double total = 0.0;
    for (std::size_t i = 0; i < a.x.size(); ++i) {
      a.w[i] *= density(a.x[i]);
      total += a.w[i];
    }
    if (!(total > 0.0)) {
      throw ArgumentError(str_cat(describe(), " has no mass on window [",
                                  window.lo, ", ", window.hi, "]"));
    }
    for (double& w : a.w) w /= total;
    return a;
  }

  std::string describe() const {
    switch (kind_) {
      case DistKind::kBernoulli:
        return str_cat("Ber(", params_[0], ")");
      case DistKind::kGaussian:
        return str_cat("N(", params_[0], ", ", params_[1], "^2)");
      case DistKind::kUniform:
        return str_cat("U(", params_[0], ", ", params_[1], ")");
      case DistKind::kDiscrete:
        return str_cat("discrete(", support_.size(), " atoms)");
    }
    return "?";
  }

 private:
  explicit Distribution(DistKind kind) : kind_(kind) {}

  DistKind kind_;
  std::vector<double> support_;
  std::vector<double> probs_;
  std::vector<double> params_;
  std::optional<QuadratureSpec> quad_;
};

// E[f(X)]: exact weighted sum over the atoms of dist.
template <typename F>
double expectation(const Distribution& dist, F&& f) {
  const Atoms a = dist.atoms();
  double sum = 0.0;
  for (std::size_t i = 0; i < a.x.size(); ++i) {
    if (a.w[i] <= 0.0) continue;
    const double v = f(a.x[i]);
    if (!std::isfinite(v)) {
      throw IntegrationError(
          str_cat("integrand is not finite (", v, ") at x = ", a.x[i]),
          a.x[i]);
    }
    sum += a.w[i] * v;
  }
  return sum;
}

// Null and alternative laws tabulated on one shared working grid. Points
// carrying no mass under either law are dropped.
class HypothesisPair {
 public:
  HypothesisPair(Distribution null_dist, Distribution alt_dist)
      : null_(std::move(null_dist)), alt_(std::move(alt_dist)) {
    check_kinds();
    if (null_.is_continuous()) {
      build_continuous(window_union(null_.quad(), alt_.quad()));
    } else {
      build_discrete();
    }
  }

  // Continuous pair forced onto a given window (composite problems share a
  // grid across all members).
  HypothesisPair(Distribution null_dist, Distribution alt_dist,
                 const QuadratureSpec& window)
      : null_(std::move(null_dist)), alt_(std::move(alt_dist)) {
    check_kinds();
    if (!null_.is_continuous()) {
      throw ArgumentError("a window only applies to continuous pairs");
    }
    build_continuous(window);
  }

  const Distribution& null_dist() const { return null_; }
  const Distribution& alt_dist() const { return alt_; }
  bool is_continuous() const { return null_.is_continuous(); }
  const std::optional<QuadratureSpec>& window() const { return window_; }

  std::size_t size() const { return points_.size(); }
  std::span<const double> points() const { return points_; }
  std::span<const double> null_mass() const { return null_mass_; }
  std::span<const double> alt_mass() const { return alt_mass_; }
  // Likelihood ratio dP1/dP0 at each grid point.
  std::span<const double> lr() const { return lr_; }

  // True when both laws coincide on the grid.
  bool identical(double tol = 1e-14) const {
    return std::all_of(lr_.begin(), lr_.end(),
                       [tol](double l) { return std::abs(l - 1.0) <= tol; });
  }

  double min_lr() const { return *std::min_element(lr_.begin(), lr_.end()); }
  double max_lr() const { return *std::max_element(lr_.begin(), lr_.end()); }

  // Likelihood ratio at an arbitrary x. Discrete pairs require x on the
  // grid; continuous pairs evaluate the density ratio of the discretized
  // laws (so values at grid nodes agree with lr()).
  double likelihood_ratio(double x) const {
    if (!is_continuous()) {
      auto it = std::lower_bound(points_.begin(), points_.end(), x);
      if (it != points_.end() && *it == x) return lr_[it - points_.begin()];
      if (alt_.mass(x) > 0.0) {
        throw AbsoluteContinuityError(
            str_cat("alternative has mass at x = ", x, " but null does not"),
            x);
      }
      throw ArgumentError(str_cat("x = ", x, " is not on the working grid"));
    }
    const double p0 = null_.density(x);
    const double p1 = alt_.density(x);
    if (p0 <= 0.0) {
      if (p1 > 0.0) {
        throw AbsoluteContinuityError(
            str_cat("alternative density positive at x = ", x,
                    " where null density vanishes"),
            x);
      }
      throw ArgumentError(str_cat("x = ", x, " carries no mass under either law"));
    }
    return p1 / p0 * norm_ratio_;
  }

  // E_P0[f(i)] / E_P1[f(i)] for per-grid-point values.
  double null_sum(std::span<const double> values) const {
    return weighted_sum(null_mass_, values);
  }
  double alt_sum(std::span<const double> values) const {
    return weighted_sum(alt_mass_, values);
  }

 private:
  static double weighted_sum(const std::vector<double>& w,
                             std::span<const double> v) {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i] > 0.0) s += w[i] * v[i];
    }
    return s;
  }

  void check_kinds() const {
    if (null_.is_continuous() != alt_.is_continuous()) {
      throw ArgumentError(str_cat(
          "pair members must share a kind (discrete with discrete, "
          "continuous with continuous); got ",
          null_.describe(), " and ", alt_.describe()));
    }
  }

  void add_point(double x, double m0, double m1) {
    if (m0 <= 0.0 && m1 <= 0.0) return;
    if (m0 <= 0.0) {
      throw AbsoluteContinuityError(
          str_cat("alternative has mass at x = ", x, " but null does not"),
          x);
    }
    points_.push_back(x);
    null_mass_.push_back(m0);
    alt_mass_.push_back(m1);
    lr_.push_back(m1 / m0);
  }

  void build_discrete() {
    std::vector<double> xs(null_.support().begin(), null_.support().end());
    xs.insert(xs.end(), alt_.support().begin(), alt_.support().end());
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    for (double x : xs) add_point(x, null_.mass(x), alt_.mass(x));
  }

  void build_continuous(const QuadratureSpec& window) {
    window_ = window;
    const Atoms a0 = null_.atoms_on(window);
    const Atoms a1 = alt_.atoms_on(window);
    // Normalizers of the two discretized laws; needed to keep off-grid
    // density ratios consistent with the tabulated ones.
    double z0 = 0.0, z1 = 0.0;
    const GaussLegendreRule rule =
        gauss_legendre(window.nodes, window.lo, window.hi);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      z0 += rule.weights[i] * null_.density(rule.nodes[i]);
      z1 += rule.weights[i] * alt_.density(rule.nodes[i]);
    }
    norm_ratio_ = z0 / z1;
    for (std::size_t i = 0; i < a0.x.size(); ++i) {
      add_point(a0.x[i], a0.w[i], a1.w[i]);
    }
  }

  Distribution null_;
  Distribution alt_;
  std::optional<QuadratureSpec> window_;
  double norm_ratio_ = 1.0;
  std::vector<double> points_;
  std::vector<double> null_mass_;
  std::vector<double> alt_mass_;
  std::vector<double> lr_;
};

inline double likelihood_ratio(const HypothesisPair& pair, double x) {
  return pair.likelihood_ratio(x);
}

// D_KL(P1 || P0) = E_P1[log L] on the pair's working grid.
inline double kl_divergence(const Distribution& p1, const Distribution& p0) {
  const HypothesisPair pair(p0, p1);
  double kl = 0.0;
  for (std::size_t i = 0; i < pair.size(); ++i) {
    kl += xlogxy(pair.alt_mass()[i], pair.null_mass()[i]);
  }
  return std::max(kl, 0.0);
}

// Objective and validity summary of an e-variable.
struct GrowthReport {
  double growth_rate = 0.0;  // E_P1[log E], nats; -inf when E hits 0
  double null_expectation = 0.0;
  std::map<std::string, double> extras;

  bool growth_finite() const { return std::isfinite(growth_rate); }
};

// Growth report for an e-variable given by its values on the pair's grid.
// A zero value at a point with alternative mass yields -inf growth.
inline GrowthReport growth_of_values(const HypothesisPair& pair,
                                     std::span<const double> values) {
  GrowthReport r;
  double g = 0.0;
  for (std::size_t i = 0; i < pair.size(); ++i) {
    const double w = pair.alt_mass()[i];
    if (w <= 0.0) continue;
    if (values[i] <= 0.0) {
      g = -std::numeric_limits<double>::infinity();
      break;
    }
    g += w * std::log(values[i]);
  }
  r.growth_rate = g;
  r.null_expectation = pair.null_sum(values);
  return r;
}

}  // namespace evar

#endif  // EVAR_DISTRIBUTION_HPP_
