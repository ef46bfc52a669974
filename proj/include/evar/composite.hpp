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

#ifndef EVAR_COMPOSITE_HPP_
#define EVAR_COMPOSITE_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "evar/constraints.hpp"
#include "evar/core.hpp"
#include "evar/distribution.hpp"
#include "evar/ldp.hpp"

namespace evar {

// Raised when a simple-vs-simple solution is not a non-decreasing function
// of L* and so cannot be lifted.
class MonotonicityError : public Error {
 public:
  using Error::Error;
};

// Least favorable pair (P0*, P1*); L* is the pair's likelihood ratio.
class LFDPair {
 public:
  LFDPair(Distribution p0_star, Distribution p1_star)
      : pair_(std::move(p0_star), std::move(p1_star)) {}
  LFDPair(Distribution p0_star, Distribution p1_star,
          const QuadratureSpec& window)
      : pair_(std::move(p0_star), std::move(p1_star), window) {}

  const Distribution& p0_star() const { return pair_.null_dist(); }
  const Distribution& p1_star() const { return pair_.alt_dist(); }
  const HypothesisPair& pair() const { return pair_; }
  double lr_star(double x) const { return pair_.likelihood_ratio(x); }

 private:
  HypothesisPair pair_;
};

struct FamilyMember {
  std::string name;
  Distribution dist;
  double theta = std::numeric_limits<double>::quiet_NaN();
};

// Composite null/alternative families given by finite member grids. For
// continuous families every member and the LFD pair share one window (the
// union of all member windows) so all expectations use the same atoms.
class CompositeProblem {
 public:
  CompositeProblem(Distribution p0_star, Distribution p1_star,
                   std::vector<FamilyMember> null_members,
                   std::vector<FamilyMember> alt_members)
      : null_members_(std::move(null_members)),
        alt_members_(std::move(alt_members)) {
    ensure_member(null_members_, p0_star, "P0*");
    ensure_member(alt_members_, p1_star, "P1*");
    if (p0_star.is_continuous()) {
      QuadratureSpec w = window_union(p0_star.quad(), p1_star.quad());
      for (const auto& m : null_members_) w = window_union(w, m.dist.quad());
      for (const auto& m : alt_members_) w = window_union(w, m.dist.quad());
      lfd_.emplace(std::move(p0_star), std::move(p1_star), w);
    } else {
      lfd_.emplace(std::move(p0_star), std::move(p1_star));
    }
  }

  const LFDPair& lfd() const { return *lfd_; }
  const std::vector<FamilyMember>& null_members() const {
    return null_members_;
  }
  const std::vector<FamilyMember>& alt_members() const { return alt_members_; }

  // 1e-8 for quadrature-backed members, 1e-12 for discrete ones.
  double default_tolerance() const {
    return lfd_->pair().is_continuous() ? 1e-8 : 1e-12;
  }

 private:
  static bool same_law(const Distribution& a, const Distribution& b) {
    if (a.kind() != b.kind()) return false;
    const auto pa = a.params(), pb = b.params();
    if (!std::equal(pa.begin(), pa.end(), pb.begin(), pb.end())) return false;
    const auto sa = a.support(), sb = b.support();
    const auto qa = a.probs(), qb = b.probs();
    return std::equal(sa.begin(), sa.end(), sb.begin(), sb.end()) &&
           std::equal(qa.begin(), qa.end(), qb.begin(), qb.end());
  }
  // The LFD member must belong to its family; add it when the grid omits it.
  static void ensure_member(std::vector<FamilyMember>& members,
                            const Distribution& d, const char* name) {
    for (const auto& m : members) {
      if (same_law(m.dist, d)) return;
    }
    members.push_back({name, d, std::numeric_limits<double>::quiet_NaN()});
  }

  std::vector<FamilyMember> null_members_;
  std::vector<FamilyMember> alt_members_;
  std::optional<LFDPair> lfd_;
};

enum class MlrFamily { kGaussianLocation, kBernoulli };

inline MlrFamily parse_family(const std::string& name) {
  if (name == "gauss-mlr" || name == "gaussian-location" || name == "gaussian")
    return MlrFamily::kGaussianLocation;
  if (name == "bernoulli" || name == "bernoulli-mlr")
    return MlrFamily::kBernoulli;
  throw ArgumentError(str_cat("unknown family '", name,
                              "' (expected gauss-mlr or bernoulli)"));
}

inline Distribution family_member(MlrFamily family, double theta,
                                  double sd = 1.0) {
  return family == MlrFamily::kGaussianLocation
             ? Distribution::gaussian(theta, sd)
             : Distribution::bernoulli(theta);
}

// Boundary pair (P_theta0, P_theta1) of a one-sided separated MLR family.
inline LFDPair mlr_boundary_lfd(MlrFamily family, double theta0,
                                double theta1, double sd = 1.0) {
  if (!(theta0 < theta1)) {
    throw ArgumentError(str_cat("MLR families must be separated: theta0 = ",
                                theta0, " >= theta1 = ", theta1));
  }
  return LFDPair(family_member(family, theta0, sd),
                 family_member(family, theta1, sd));
}

// Null {theta <= theta0} and alternative {theta >= theta1} sampled on the
// given grids, with the boundary pair as LFD.
inline CompositeProblem mlr_problem(MlrFamily family, double theta0,
                                    double theta1,
                                    const std::vector<double>& null_grid,
                                    const std::vector<double>& alt_grid,
                                    double sd = 1.0) {
  if (!(theta0 < theta1)) {
    throw ArgumentError(str_cat("MLR families must be separated: theta0 = ",
                                theta0, " >= theta1 = ", theta1));
  }
  std::vector<FamilyMember> nulls, alts;
  for (double th : null_grid) {
    if (th > theta0) {
      throw ArgumentError(str_cat("null member theta = ", th,
                                  " exceeds theta0 = ", theta0));
    }
    nulls.push_back({str_cat("theta=", th), family_member(family, th, sd), th});
  }
  for (double th : alt_grid) {
    if (th < theta1) {
      throw ArgumentError(str_cat("alternative member theta = ", th,
                                  " is below theta1 = ", theta1));
    }
    alts.push_back({str_cat("theta=", th), family_member(family, th, sd), th});
  }
  return CompositeProblem(family_member(family, theta0, sd),
                          family_member(family, theta1, sd), std::move(nulls),
                          std::move(alts));
}

// E* = psi(L*) for a non-decreasing psi, tabulated on the LFD grid.
struct CompositeEVariable {
  std::function<double(double)> psi;
  std::vector<std::pair<double, double>> table;  // (L*, psi(L*)), by L*
  std::string provenance;
  double claimed_growth = 0.0;  // E_P1*[log psi(L*)]

  double operator()(double lr) const { return psi(lr); }
};

// Wraps a simple-vs-simple solution on the LFD pair as a composite
// e-variable; refuses when psi is not non-decreasing on the grid.
template <typename EVariable>
CompositeEVariable lift(const EVariable& ev, const CompositeProblem& problem) {
  const HypothesisPair& pair = problem.lfd().pair();
  CompositeEVariable out;
  out.psi = [ev](double lr) { return ev(lr); };
  out.provenance = EVariable::kind();
  for (double l : pair.lr()) out.table.emplace_back(l, ev(l));
  std::sort(out.table.begin(), out.table.end());
  for (std::size_t i = 1; i < out.table.size(); ++i) {
    if (out.table[i].first > out.table[i - 1].first &&
        out.table[i].second < out.table[i - 1].second) {
      throw MonotonicityError(
          str_cat("lift refused: psi decreases between L* = ",
                  out.table[i - 1].first, " and L* = ", out.table[i].first));
    }
  }
  out.claimed_growth = growth_rate(ev, pair).growth_rate;
  return out;
}

struct MemberReport {
  std::string name;
  double theta = std::numeric_limits<double>::quiet_NaN();
  // Null members: E_P0[E*]. Alternative members: E_P1[log E*].
  double value = 0.0;
  // Null: 1 - value. Alternative: value - reference growth.
  double margin = 0.0;
  // Output-1 probability under the member (LDP validation only).
  double marginal = std::numeric_limits<double>::quiet_NaN();
  bool passed = true;
};

struct CompositeValidation {
  std::vector<MemberReport> null_reports;
  std::vector<MemberReport> alt_reports;
  double reference_growth = 0.0;  // at P1*
  double tolerance = 0.0;
  std::string argmin_alt;  // alternative member with the smallest growth
  double min_alt_growth = std::numeric_limits<double>::infinity();
  double argmin_theta = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::string> failures;

  bool ok() const { return failures.empty(); }
};

namespace detail {

inline void finalize(CompositeValidation& v) {
  for (const auto& r : v.null_reports) {
    if (!r.passed) v.failures.push_back("null member " + r.name);
  }
  for (const auto& r : v.alt_reports) {
    if (!r.passed) v.failures.push_back("alternative member " + r.name);
    if (r.value < v.min_alt_growth) {
      v.min_alt_growth = r.value;
      v.argmin_alt = r.name;
      v.argmin_theta = r.theta;
    }
  }
}

}  // namespace detail

// Sweeps the member grids: null validity E[psi(L*)] <= 1 + tol and
// alternative growth no worse than at P1* (minus tol). Violations are
// reported, never thrown.
inline CompositeValidation validate_composite(const CompositeEVariable& ev,
                                              const CompositeProblem& problem,
                                              std::optional<double> tol = {}) {
  const HypothesisPair& pair = problem.lfd().pair();
  CompositeValidation v;
  v.tolerance = tol.value_or(problem.default_tolerance());
  auto sweep = [&](const Distribution& d, bool log_scale) {
    const Atoms a = atoms_on_grid(d, pair);
    double s = 0.0;
    for (std::size_t i = 0; i < a.x.size(); ++i) {
      if (a.w[i] <= 0.0) continue;
      const double e = ev(pair.likelihood_ratio(a.x[i]));
      if (log_scale) {
        if (e <= 0.0) return -std::numeric_limits<double>::infinity();
        s += a.w[i] * std::log(e);
      } else {
        s += a.w[i] * e;
      }
    }
    return s;
  };
  v.reference_growth = sweep(problem.lfd().p1_star(), true);
  for (const auto& m : problem.null_members()) {
    MemberReport r{m.name, m.theta, sweep(m.dist, false)};
    r.margin = 1.0 - r.value;
    r.passed = r.value <= 1.0 + v.tolerance;
    v.null_reports.push_back(r);
  }
  for (const auto& m : problem.alt_members()) {
    MemberReport r{m.name, m.theta, sweep(m.dist, true)};
    r.margin = r.value - v.reference_growth;
    r.passed = r.margin >= -v.tolerance;
    v.alt_reports.push_back(r);
  }
  detail::finalize(v);
  return v;
}

struct CompositeLdpResult {
  BinaryThresholdSolution solution;
  PrivateEVariable evariable;
  CompositeValidation validation;
  double worst_case_growth = 0.0;  // d(Ber(m1*) || Ber(m0*))
};

// Optimal binary mechanism on the LFD pair, with the member sweep checking
// the output-marginal dominance m_P0 <= m_P0* and m_P1 >= m_P1*.
inline CompositeLdpResult composite_ldp(const CompositeProblem& problem,
                                        PrivacyBudget budget,
                                        std::optional<double> tol = {}) {
  const HypothesisPair& pair = problem.lfd().pair();
  CompositeLdpResult res;
  res.solution = solve_binary_threshold(pair, budget);
  res.evariable = private_evariable(res.solution.mechanism, pair);
  const Marginals star = res.evariable.marginals;
  res.worst_case_growth = bernoulli_kl(star.m1, star.m0);

  CompositeValidation& v = res.validation;
  v.tolerance = tol.value_or(problem.default_tolerance());
  v.reference_growth = res.worst_case_growth;
  const double log_v0 = std::log(res.evariable.v0);
  const double log_v1 = std::log(res.evariable.v1);
  for (const auto& m : problem.null_members()) {
    MemberReport r{m.name, m.theta};
    r.marginal = induced_marginal(res.solution.mechanism, m.dist, pair);
    r.value = r.marginal * res.evariable.v1 +
              (1.0 - r.marginal) * res.evariable.v0;
    r.margin = 1.0 - r.value;
    r.passed = r.marginal <= star.m0 + v.tolerance &&
               r.value <= 1.0 + v.tolerance;
    v.null_reports.push_back(r);
  }
  for (const auto& m : problem.alt_members()) {
    MemberReport r{m.name, m.theta};
    r.marginal = induced_marginal(res.solution.mechanism, m.dist, pair);
    r.value = r.marginal * log_v1 + (1.0 - r.marginal) * log_v0;
    r.margin = r.value - v.reference_growth;
    r.passed = r.marginal >= star.m1 - v.tolerance &&
               r.margin >= -v.tolerance;
    v.alt_reports.push_back(r);
  }
  detail::finalize(v);
  return res;
}

}  // namespace evar

#endif  // EVAR_COMPOSITE_HPP_
