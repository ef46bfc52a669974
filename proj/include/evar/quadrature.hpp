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

#ifndef EVAR_QUADRATURE_HPP_
#define EVAR_QUADRATURE_HPP_

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

#include "evar/core.hpp"

namespace evar {

// Gauss-Legendre rule on [-1, 1]. Nodes are ascending.
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Newton iteration on P_n from the Chebyshev-like initial guess; the
// three-term recurrence gives P_n and P_n' together.
inline GaussLegendreRule gauss_legendre(int n) {
  if (n < 1) throw ArgumentError(str_cat("quadrature needs n >= 1, got ", n));
  GaussLegendreRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // One more evaluation at the converged node for the weight.
    double p0 = 1.0, p1 = 0.0;
    for (int k = 1; k <= n; ++k) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p2) / k;
    }
    dp = n * (x * p0 - p1) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

// Process-wide cache of reference rules; entries are never mutated once
// inserted, so returned references stay valid and readable from any thread.
inline const GaussLegendreRule& reference_gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<const GaussLegendreRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) {
    it = cache
             .emplace(n, std::make_unique<const GaussLegendreRule>(
                             gauss_legendre(n)))
             .first;
  }
  return *it->second;
}

// Affine map of the rule onto [lo, hi].
inline GaussLegendreRule gauss_legendre(int n, double lo, double hi) {
  GaussLegendreRule rule = reference_gauss_legendre(n);
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = mid + half * rule.nodes[i];
    rule.weights[i] *= half;
  }
  return rule;
}

// Fixed-node integral of f over [lo, hi].
template <typename F>
double integrate(F&& f, double lo, double hi,
                 int nodes = kDefaultQuadratureNodes) {
  if (hi <= lo) return 0.0;
  const GaussLegendreRule& rule = reference_gauss_legendre(nodes);
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  double sum = 0.0;
  for (int i = 0; i < nodes; ++i) {
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return half * sum;
}

}  // namespace evar

#endif  // EVAR_QUADRATURE_HPP_
