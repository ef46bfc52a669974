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

#ifndef EVAR_CORE_HPP_
#define EVAR_CORE_HPP_

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

namespace evar {

// Error hierarchy. Every failure the library reports derives from Error so
// callers (the CLI in particular) can map kinds to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double point)
      : Error(what), point_(point) {}
  double point() const { return point_; }

 private:
  double point_;
};

class AbsoluteContinuityError : public Error {
 public:
  AbsoluteContinuityError(const std::string& what, double point)
      : Error(what), point_(point) {}
  double point() const { return point_; }

 private:
  double point_;
};

class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// Carries the best iterate reached before giving up.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double best_iterate, double residual)
      : Error(what), best_iterate_(best_iterate), residual_(residual) {}
  double best_iterate() const { return best_iterate_; }
  double residual() const { return residual_; }

 private:
  double best_iterate_;
  double residual_;
};

// Numerical knobs shared by the solvers. Defaults are the documented ones;
// every solver accepts an override.
struct Tolerances {
  double mass_sum = 1e-12;          // discrete probabilities must sum to 1
  double null_expectation = 1e-9;   // E_P0[E] <= 1 + this for e-variables
  double fixed_point = 1e-10;       // damped fixed-point stopping rule
  double fixed_point_damping = 0.5;
  int fixed_point_max_iter = 10000;
  double multiplier = 1e-12;        // dual bisection width (relative)
  double constraint = 1e-10;        // dual constraint residual target
  int bisection_max_iter = 200;
  int bracket_max_doublings = 60;
};

inline constexpr int kDefaultQuadratureNodes = 256;
inline constexpr int kMinQuadratureNodes = 16;
inline constexpr double kGaussianWindowSds = 8.0;

template <typename... Args>
std::string str_cat(Args&&... args) {
  std::ostringstream os;
  os.precision(17);
  (os << ... << std::forward<Args>(args));
  return os.str();
}

// x*log(x/y) with the 0*log(0/y) = 0 convention.
inline double xlogxy(double x, double y) {
  if (x <= 0.0) return 0.0;
  return x * std::log(x / y);
}

// Kullback-Leibler divergence d(Ber(p) || Ber(q)) in nats.
inline double bernoulli_kl(double p, double q) {
  return xlogxy(p, q) + xlogxy(1.0 - p, 1.0 - q);
}

}  // namespace evar

#endif  // EVAR_CORE_HPP_
