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

#ifndef EVAR_TOOLS_EVAR_CLI_HPP_
#define EVAR_TOOLS_EVAR_CLI_HPP_

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "evar/evar.hpp"

namespace evar::cli {

using json = nlohmann::json;
using io::number;
using io::numbers;

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFinding = 2;

// A finished command: the document to write and its exit code.
struct Outcome {
  json doc;
  int code = kExitOk;
};

namespace detail {

inline std::string wealth_text(double log_wealth) {
  if (std::abs(log_wealth) < 700.0) {
    return io::format_number(std::exp(log_wealth));
  }
  const double l10 = log_wealth / std::log(10.0);
  double exponent = std::floor(l10);
  double mantissa = std::pow(10.0, l10 - exponent);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.11f", mantissa);
  if (std::strtod(buf, nullptr) >= 10.0) {
    exponent += 1.0;
    mantissa /= 10.0;
    std::snprintf(buf, sizeof buf, "%.11f", mantissa);
  }
  // Trim trailing zeros the way %g would.
  std::string m = buf;
  while (m.back() == '0') m.pop_back();
  if (m.back() == '.') m.pop_back();
  return m + (exponent < 0 ? "e-" : "e+") +
         std::to_string(static_cast<long long>(std::abs(exponent)));
}

inline json grid_table(const HypothesisPair& pair,
                       const std::vector<double>& values) {
  return {{"x", numbers({pair.points().begin(), pair.points().end()})},
          {"L", numbers({pair.lr().begin(), pair.lr().end()})},
          {"E", numbers(values)}};
}

inline json growth_json(const GrowthReport& g) {
  json j{{"growth_rate", number(g.growth_rate)},
         {"null_expectation", number(g.null_expectation)},
         {"growth_finite", g.growth_finite()}};
  for (const auto& [k, v] : g.extras) j[k] = number(v);
  return j;
}

inline json binary_json(const BinaryThresholdSolution& sol,
                        const PrivateEVariable& ev) {
  return {{"t", number(sol.threshold)},
          {"m0", number(ev.marginals.m0)},
          {"m1", number(ev.marginals.m1)},
          {"v0", number(ev.v0)},
          {"v1", number(ev.v1)},
          {"J", number(sol.objective)},
          {"residual", number(sol.residual)},
          {"interior", sol.interior},
          {"method", sol.method},
          {"iterations", sol.iterations},
          {"optimal_thresholds", numbers(sol.optimal_thresholds)},
          {"q_high", number(sol.mechanism.high())},
          {"q_low", number(sol.mechanism.low())},
          {"null_expectation", number(ev.null_expectation())}};
}

inline json quantize_json(const TwoLevelEVariable& ev) {
  return {{"t_star", number(ev.t_star)},
          {"u0", number(ev.u0)},
          {"u1", number(ev.u1)},
          {"alpha", number(ev.alpha)},
          {"beta", number(ev.beta)},
          {"growth", number(ev.growth)},
          {"residual", number(ev.residual)},
          {"interior", ev.interior},
          {"degenerate", ev.degenerate},
          {"method", ev.method},
          {"optimal_thresholds", numbers(ev.optimal_thresholds)}};
}

inline json clip_json(const ClippedEVariable& ev) {
  return {{"c1", number(ev.c1)},
          {"c2", number(ev.c2)},
          {"lambda_star", number(ev.lambda_star)},
          {"null_expectation", number(ev.null_expectation)}};
}

inline json convex_json(const ConvexConstrainedEVariable& ev,
                        const HypothesisPair& pair) {
  double kkt = 0.0;
  for (std::size_t i = 0; i < pair.size(); ++i) {
    kkt = std::max(kkt, ev.kkt_residual(pair.lr()[i]));
  }
  return {{"lambda", number(ev.lambda)},
          {"gamma", number(ev.gamma)},
          {"penalty", ev.penalty.name},
          {"C", number(ev.budget)},
          {"closed_form", ev.closed_form},
          {"active_set", ev.active_set},
          {"null_expectation", number(ev.null_expectation)},
          {"null_penalty", number(ev.null_penalty)},
          {"max_kkt_residual", number(kkt)}};
}

inline json member_json(const MemberReport& r) {
  json j{{"name", r.name},
         {"theta", number(r.theta)},
         {"value", number(r.value)},
         {"margin", number(r.margin)},
         {"passed", r.passed}};
  if (!std::isnan(r.marginal)) j["marginal"] = number(r.marginal);
  return j;
}

inline json validation_json(const CompositeValidation& v) {
  json nulls = json::array(), alts = json::array();
  for (const auto& r : v.null_reports) nulls.push_back(member_json(r));
  for (const auto& r : v.alt_reports) alts.push_back(member_json(r));
  return {{"tolerance", number(v.tolerance)},
          {"reference_growth", number(v.reference_growth)},
          {"null_members", nulls},
          {"alt_members", alts},
          {"argmin_alt", v.argmin_alt},
          {"argmin_theta", number(v.argmin_theta)},
          {"min_alt_growth", number(v.min_alt_growth)},
          {"ok", v.ok()},
          {"failures", v.failures}};
}

// Maps library exceptions onto the exit-code contract. Findings keep the
// document (status + diagnostics); usage errors print to err only.
inline Outcome guarded(const std::function<Outcome()>& body, json base,
                       std::ostream& err, bool& usage_error) {
  usage_error = false;
  auto finding = [&](const char* status, const std::string& msg,
                     json extra) {
    Outcome o{std::move(base), kExitFinding};
    o.doc["status"] = status;
    extra["message"] = msg;
    o.doc["diagnostics"] = std::move(extra);
    err << "evar: " << msg << "\n";
    return o;
  };
  try {
    Outcome o = body();
    json doc = std::move(base);
    for (auto& [k, v] : o.doc.items()) doc[k] = v;
    if (!doc.contains("status")) doc["status"] = "ok";
    o.doc = std::move(doc);
    return o;
  } catch (const ArgumentError& e) {
    err << "evar: " << e.what() << "\n";
  } catch (const SchemaError& e) {
    err << "evar: schema error: " << e.what() << "\n";
  } catch (const AbsoluteContinuityError& e) {
    err << "evar: " << e.what() << "\n";
  } catch (const InfeasibleError& e) {
    return finding("infeasible", e.what(), json::object());
  } catch (const SolverError& e) {
    return finding("solver-error", e.what(),
                   {{"best_iterate", number(e.best_iterate())},
                    {"residual", number(e.residual())}});
  } catch (const IntegrationError& e) {
    return finding("integration-error", e.what(),
                   {{"point", number(e.point())}});
  } catch (const MonotonicityError& e) {
    return finding("lift-refused", e.what(), json::object());
  }
  usage_error = true;
  return {json(), kExitUsage};
}

inline bool emit(const std::string& path, const std::string& text,
                 std::ostream& out, std::ostream& err) {
  if (path.empty() || path == "-") {
    out << text;
    return true;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    err << "evar: cannot write '" << path << "'\n";
    return false;
  }
  f << text;
  return static_cast<bool>(f);
}

}  // namespace detail

// Entry point. args excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err) {
  CLI::App app{"Constrained growth-rate-optimal e-variables", "evar"};
  app.failure_message(CLI::FailureMessage::help);
  app.require_subcommand(1);

  std::string out_path;
  std::string pair_path;
  double epsilon = 0.0;
  double q = 0.0;
  std::optional<double> q_true;
  std::int64_t rounds = 0;
  std::uint64_t seed = 0;
  double c1 = 0.0, c2 = 0.0, budget = 0.0;
  std::string penalty = "square";
  std::string family = "gauss-mlr";
  double theta0 = 0.0, theta1 = 0.0, sd = 1.0;
  std::vector<double> null_grid, alt_grid;
  std::string constraint;
  std::optional<double> tol;
  double mu = 0.25, clip_c = 3.0;
  int nodes = kDefaultQuadratureNodes;
  oracle::DualLatticeOptions lattice;

  auto add_out = [&](CLI::App* s) {
    s->add_option("--out", out_path, "result file (stdout when omitted)");
  };
  auto add_pair = [&](CLI::App* s) {
    s->add_option("--pair", pair_path, "hypothesis pair JSON")
        ->required()
        ->check(CLI::ExistingFile);
  };
  auto add_seed = [&](CLI::App* s) {
    s->add_option("--seed", seed, "random seed")->capture_default_str();
  };

  CLI::App* ldp = app.add_subcommand("ldp-solve", "optimal eps-LDP binary mechanism");
  add_pair(ldp);
  ldp->add_option("--epsilon", epsilon, "privacy budget (nats)")->required();
  add_seed(ldp);
  add_out(ldp);

  CLI::App* kelly = app.add_subcommand("kelly", "privatized Kelly betting simulation");
  kelly->add_option("--q", q, "alternative Bernoulli parameter of the bet")
      ->required();
  kelly->add_option("--q-true", q_true,
                    "data-generating Bernoulli parameter (default: --q)");
  kelly->add_option("--epsilon", epsilon, "privacy budget (nats)")->required();
  kelly->add_option("--rounds", rounds, "number of rounds")->required();
  add_seed(kelly);
  add_out(kelly);

  CLI::App* quant = app.add_subcommand("quantize", "two-level quantized e-variable");
  add_pair(quant);
  add_seed(quant);
  add_out(quant);

  CLI::App* clip = app.add_subcommand("clip", "bounded (clipped) e-variable");
  add_pair(clip);
  clip->add_option("--c1", c1, "lower bound, 0 <= c1 <= 1")->required();
  clip->add_option("--c2", c2, "upper bound, 1 <= c2 < inf")->required();
  add_seed(clip);
  add_out(clip);

  CLI::App* moment = app.add_subcommand("moment", "second-moment constrained e-variable");
  add_pair(moment);
  moment->add_option("--C", budget, "bound on E_P0[E^2]")->required();
  add_seed(moment);
  add_out(moment);

  CLI::App* convex = app.add_subcommand("convex", "convex integral constrained e-variable");
  add_pair(convex);
  convex->add_option("--penalty", penalty, "square, xlogx or power:<p>")
      ->capture_default_str();
  convex->add_option("--C", budget, "bound on E_P0[phi(E)]")->required();
  add_seed(convex);
  add_out(convex);

  CLI::App* comp = app.add_subcommand("composite", "lifted e-variable for an MLR composite problem");
  comp->add_option("--family", family, "gauss-mlr or bernoulli")
      ->capture_default_str();
  comp->add_option("--theta0", theta0, "null boundary")->required();
  comp->add_option("--theta1", theta1, "alternative boundary")->required();
  comp->add_option("--null-grid", null_grid, "null member parameters")
      ->required()
      ->delimiter(',');
  comp->add_option("--alt-grid", alt_grid, "alternative member parameters")
      ->required()
      ->delimiter(',');
  comp->add_option("--sd", sd, "Gaussian scale")->capture_default_str();
  comp->add_option("--constraint", constraint, "clip, quantize, moment or ldp")
      ->required()
      ->check(CLI::IsMember({"clip", "quantize", "moment", "ldp"}));
  comp->add_option("--c1", c1, "clip lower bound");
  comp->add_option("--c2", c2, "clip upper bound");
  comp->add_option("--C", budget, "second-moment bound");
  comp->add_option("--epsilon", epsilon, "privacy budget");
  comp->add_option("--tol", tol, "validation tolerance");
  add_seed(comp);
  add_out(comp);

  CLI::App* cex = app.add_subcommand("counterexample", "bounded-mean counterexample without an LFD");
  cex->add_option("--mu", mu, "null mean bound, 0 < mu < 1/2")
      ->capture_default_str();
  cex->add_option("--c", clip_c, "clip level, c > 1")->capture_default_str();
  cex->add_option("--nodes", nodes, "Gauss-Legendre nodes")
      ->capture_default_str();
  add_seed(cex);
  add_out(cex);

  CLI::App* orc = app.add_subcommand("oracle", "brute-force reference solvers");
  orc->require_subcommand(1);
  CLI::App* orc_ldp = orc->add_subcommand("ldp", "all 2^n binary channels");
  add_pair(orc_ldp);
  orc_ldp->add_option("--epsilon", epsilon, "privacy budget")->required();
  add_out(orc_ldp);
  CLI::App* orc_q = orc->add_subcommand("quantize", "all 2^n two-level sets");
  add_pair(orc_q);
  add_out(orc_q);
  CLI::App* orc_cvx = orc->add_subcommand("convex", "multiplier lattice search");
  add_pair(orc_cvx);
  orc_cvx->add_option("--penalty", penalty, "square, xlogx or power:<p>")
      ->capture_default_str();
  orc_cvx->add_option("--C", budget, "penalty budget")->required();
  orc_cvx->add_option("--lattice", lattice.lattice, "coarse lattice size")
      ->capture_default_str();
  orc_cvx->add_option("--refine-levels", lattice.refine_levels,
                      "gamma zoom rounds")
      ->capture_default_str();
  orc_cvx->add_option("--refine-lattice", lattice.refine_lattice,
                      "gamma points per zoom round")
      ->capture_default_str();
  add_out(orc_cvx);
  for (CLI::App* s : {orc_ldp, orc_q, orc_cvx}) add_seed(s);

  std::vector<const char*> argv{"evar"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  // Kelly writes CSV, everything else JSON.
  if (kelly->parsed()) {
    std::ostringstream csv;
    try {
      const double qt = q_true.value_or(q);
      const WealthTrajectory tr =
          simulate_ldp_kelly(qt, q, PrivacyBudget(epsilon), rounds, seed);
      const json cfg{{"command", "kelly"},
                     {"q", number(q)},
                     {"q_true", number(qt)},
                     {"epsilon", number(epsilon)},
                     {"rounds", rounds},
                     {"seed", seed},
                     {"f_star", number(tr.f_star)}};
      csv << "# config: " << cfg.dump() << "\n";
      csv << "round,y,e_value,wealth\n";
      csv << "0,,," << io::format_number(1.0) << "\n";
      for (std::size_t r = 1; r <= tr.rounds(); ++r) {
        csv << r << ',' << static_cast<int>(tr.bits[r - 1]) << ','
            << io::format_number(tr.e_value(r)) << ','
            << detail::wealth_text(tr.log_wealth[r]) << '\n';
      }
    } catch (const Error& e) {
      err << "evar: " << e.what() << "\n";
      return kExitUsage;
    }
    return detail::emit(out_path, csv.str(), out, err) ? kExitOk : kExitUsage;
  }

  std::string command;
  json config;
  std::function<Outcome()> body;
  auto load_pair = [&]() { return io::read_pair(pair_path); };

  if (ldp->parsed()) {
    command = "ldp-solve";
    config = {{"pair", pair_path}, {"epsilon", number(epsilon)}};
    body = [&]() {
      const HypothesisPair pair = load_pair();
      const PrivacyBudget b(epsilon);
      const BinaryThresholdSolution sol = solve_binary_threshold(pair, b);
      const PrivateEVariable ev = private_evariable(sol.mechanism, pair);
      json r = detail::binary_json(sol, ev);
      r["ldp_satisfied"] = satisfies_ldp(sol.mechanism, pair);
      r["kl_divergence"] =
          number(kl_divergence(pair.alt_dist(), pair.null_dist()));
      return Outcome{{{"pair", io::to_json(pair)}, {"result", r}}};
    };
  } else if (quant->parsed()) {
    command = "quantize";
    config = {{"pair", pair_path}};
    body = [&]() {
      const HypothesisPair pair = load_pair();
      const TwoLevelEVariable ev = solve_quantized(pair);
      json r = detail::quantize_json(ev);
      r["report"] = detail::growth_json(growth_rate(ev, pair));
      r["grid"] = detail::grid_table(pair, values_on_grid(ev, pair));
      return Outcome{{{"pair", io::to_json(pair)}, {"result", r}}};
    };
  } else if (clip->parsed()) {
    command = "clip";
    config = {{"pair", pair_path}, {"c1", number(c1)}, {"c2", number(c2)}};
    body = [&]() -> Outcome {
      if (!(c1 >= 0.0 && c1 <= 1.0 && c2 >= 1.0 && std::isfinite(c2))) {
        throw ArgumentError(str_cat("infeasible bounds: need 0 <= c1 <= 1 <= "
                                    "c2 < inf, got c1 = ",
                                    c1, ", c2 = ", c2));
      }
      const HypothesisPair pair = load_pair();
      const ClippedEVariable ev = solve_bounded(pair, c1, c2);
      const GrowthReport g = growth_rate(ev, pair);
      json r = detail::clip_json(ev);
      r["report"] = detail::growth_json(g);
      r["grid"] = detail::grid_table(pair, values_on_grid(ev, pair));
      if (!g.growth_finite()) {
        r["flags"] = {"growth is -inf: E* = 0 where the alternative has mass"};
      }
      return Outcome{{{"pair", io::to_json(pair)}, {"result", r}}};
    };
  } else if (moment->parsed() || convex->parsed()) {
    const bool is_moment = moment->parsed();
    command = is_moment ? "moment" : "convex";
    config = {{"pair", pair_path}, {"C", number(budget)}};
    if (!is_moment) config["penalty"] = penalty;
    body = [&, is_moment]() {
      const HypothesisPair pair = load_pair();
      const ConvexConstrainedEVariable ev =
          is_moment ? solve_moment(pair, budget)
                    : solve_convex(pair, ConvexPenalty::by_name(penalty),
                                   budget);
      json r = detail::convex_json(ev, pair);
      r["report"] = detail::growth_json(growth_rate(ev, pair));
      r["grid"] = detail::grid_table(pair, values_on_grid(ev, pair));
      return Outcome{{{"pair", io::to_json(pair)}, {"result", r}}};
    };
  } else if (comp->parsed()) {
    command = "composite";
    config = {{"family", family},
              {"theta0", number(theta0)},
              {"theta1", number(theta1)},
              {"null_grid", numbers(null_grid)},
              {"alt_grid", numbers(alt_grid)},
              {"sd", number(sd)},
              {"constraint", constraint}};
    auto need = [&](const char* flag) {
      if (comp->count(flag) == 0) {
        throw ArgumentError(str_cat("--constraint ", constraint, " needs ",
                                    flag));
      }
    };
    body = [&, need]() {
      if (constraint == "clip") {
        need("--c1");
        need("--c2");
        if (!(c1 >= 0.0 && c1 <= 1.0 && c2 >= 1.0 && std::isfinite(c2))) {
          throw ArgumentError(str_cat("infeasible bounds: need 0 <= c1 <= 1 "
                                      "<= c2 < inf, got c1 = ",
                                      c1, ", c2 = ", c2));
        }
        config["c1"] = number(c1);
        config["c2"] = number(c2);
      } else if (constraint == "moment") {
        need("--C");
        config["C"] = number(budget);
      } else if (constraint == "ldp") {
        need("--epsilon");
        config["epsilon"] = number(epsilon);
      }
      const CompositeProblem problem = mlr_problem(
          parse_family(family), theta0, theta1, null_grid, alt_grid, sd);
      config["tol"] = number(tol.value_or(problem.default_tolerance()));
      const HypothesisPair& lfd = problem.lfd().pair();
      json r{{"lfd", {{"p0_star", io::to_json(problem.lfd().p0_star())},
                      {"p1_star", io::to_json(problem.lfd().p1_star())}}}};
      CompositeValidation v;
      if (constraint == "ldp") {
        const CompositeLdpResult res =
            composite_ldp(problem, PrivacyBudget(epsilon), tol);
        r["solution"] = detail::binary_json(res.solution, res.evariable);
        r["worst_case_growth"] = number(res.worst_case_growth);
        v = res.validation;
      } else {
        CompositeEVariable ev;
        if (constraint == "clip") {
          const ClippedEVariable s = solve_bounded(lfd, c1, c2);
          r["solution"] = detail::clip_json(s);
          ev = lift(s, problem);
        } else if (constraint == "quantize") {
          const TwoLevelEVariable s = solve_quantized(lfd);
          r["solution"] = detail::quantize_json(s);
          ev = lift(s, problem);
        } else {
          const ConvexConstrainedEVariable s = solve_moment(lfd, budget);
          r["solution"] = detail::convex_json(s, lfd);
          ev = lift(s, problem);
        }
        r["provenance"] = ev.provenance;
        r["worst_case_growth"] = number(ev.claimed_growth);
        v = validate_composite(ev, problem, tol);
      }
      r["validation"] = detail::validation_json(v);
      Outcome o{{{"result", r}}};
      if (!v.ok()) {
        o.code = kExitFinding;
        o.doc["status"] = "validation-failed";
        o.doc["diagnostics"] = {{"failures", v.failures}};
      }
      return o;
    };
  } else if (cex->parsed()) {
    command = "counterexample";
    config = {{"mu", number(mu)}, {"c", number(clip_c)}, {"nodes", nodes}};
    body = [&]() {
      if (nodes < kMinQuadratureNodes) {
        throw ArgumentError(str_cat("--nodes must be >= ", kMinQuadratureNodes));
      }
      const counterexample::Verdict v =
          counterexample::verify_counterexample({mu, clip_c, nodes});
      json r{{"lambda_star", number(v.lambda_star)},
             {"lambda_star_residual", number(v.lambda_star_residual)},
             {"lambda_new", number(v.lambda_new)},
             {"growth_estar", number(v.growth_estar)},
             {"growth_eprime", number(v.growth_eprime)},
             {"gap", number(v.gap)},
             {"grad_at_star", number(v.grad_at_star)},
             {"z_c_star", number(v.z_c_star)},
             {"hypothesis_value", number(mu + (clip_c - 1.0) / v.lambda_star)},
             {"hypothesis_holds", v.hypothesis_holds},
             {"invariants_hold", v.invariants_hold}};
      Outcome o{{{"result", r}}};
      if (!v.hypothesis_holds) {
        o.doc["status"] = "inapplicable";
      } else if (!v.invariants_hold) {
        o.code = kExitFinding;
        o.doc["status"] = "invariants-failed";
      }
      return o;
    };
  } else if (orc_ldp->parsed() || orc_q->parsed() || orc_cvx->parsed()) {
    const std::string which =
        orc_ldp->parsed() ? "ldp" : orc_q->parsed() ? "quantize" : "convex";
    command = "oracle " + which;
    config = {{"pair", pair_path}};
    if (which == "ldp") config["epsilon"] = number(epsilon);
    if (which == "convex") {
      config["penalty"] = penalty;
      config["C"] = number(budget);
      config["lattice"] = lattice.lattice;
      config["refine_levels"] = lattice.refine_levels;
      config["refine_lattice"] = lattice.refine_lattice;
    }
    body = [&, which]() {
      const HypothesisPair pair = load_pair();
      oracle::OracleResult res;
      if (which == "ldp") {
        res = oracle::brute_force_binary_mechanism(pair, epsilon);
      } else if (which == "quantize") {
        res = oracle::brute_force_quantizer(pair);
      } else {
        const ConvexPenalty pen = ConvexPenalty::by_name(penalty);
        res = oracle::grid_dual_oracle(pair, pen.eval, pen.deriv, budget,
                                       lattice);
      }
      json r{{"best_value", number(res.best_value)},
             {"best_config", res.best_config},
             {"evaluations", res.evaluations}};
      if (which == "convex") {
        r["feasible"] = res.feasible;
        r["best_lambda"] = number(res.best_lambda);
        r["best_gamma"] = number(res.best_gamma);
      } else {
        r["best_set"] = res.best_set;
        r["is_level_set"] = oracle::is_level_set(pair, res.best_set);
      }
      Outcome o{{{"pair", io::to_json(pair)}, {"result", r}}};
      if (!res.feasible) {
        o.code = kExitFinding;
        o.doc["status"] = "infeasible";
        o.doc["diagnostics"] = {{"message", res.best_config}};
      }
      return o;
    };
  }

  config["seed"] = seed;
  config["out"] = out_path;
  bool usage_error = false;
  Outcome o = detail::guarded(
      body, json{{"command", command}, {"config", json()}}, err, usage_error);
  if (usage_error) return kExitUsage;
  o.doc["config"] = config;  // resolved inside body for composite
  if (!detail::emit(out_path, o.doc.dump(2) + "\n", out, err)) {
    return kExitUsage;
  }
  return o.code;
}

inline int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace evar::cli

#endif  // EVAR_TOOLS_EVAR_CLI_HPP_
