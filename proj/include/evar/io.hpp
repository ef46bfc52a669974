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

#ifndef EVAR_IO_HPP_
#define EVAR_IO_HPP_

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "evar/core.hpp"
#include "evar/distribution.hpp"
#include "json.hpp"

namespace evar::io {

using json = nlohmann::json;

inline constexpr int kSignificantDigits = 12;

// %.12g text of a finite double; "inf", "-inf", "nan" otherwise.
inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", kSignificantDigits, x);
  return buf;
}

// JSON value rounded to 12 significant digits. The shortest round-trip
// printer then emits at most 12 digits. Non-finite values become strings.
inline json number(double x) {
  if (!std::isfinite(x)) return format_number(x);
  const double r = std::strtod(format_number(x).c_str(), nullptr);
  return r == 0.0 ? 0.0 : r;  // no "-0.0"
}

inline json numbers(const std::vector<double>& xs) {
  json a = json::array();
  for (double x : xs) a.push_back(number(x));
  return a;
}

namespace detail {

inline const json& field(const json& j, const char* key, const char* where) {
  if (!j.is_object() || !j.contains(key)) {
    throw SchemaError(str_cat(where, ": missing field \"", key, "\""));
  }
  return j.at(key);
}

inline double real(const json& j, const char* key, const char* where) {
  const json& v = field(j, key, where);
  if (!v.is_number()) {
    throw SchemaError(str_cat(where, ": field \"", key, "\" must be a number"));
  }
  return v.get<double>();
}

inline std::vector<double> reals(const json& j, const char* key,
                                 const char* where) {
  const json& v = field(j, key, where);
  if (!v.is_array()) {
    throw SchemaError(str_cat(where, ": field \"", key, "\" must be an array"));
  }
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) {
      throw SchemaError(
          str_cat(where, ": field \"", key, "\" must hold numbers only"));
    }
    out.push_back(e.get<double>());
  }
  return out;
}

}  // namespace detail

inline QuadratureSpec quadrature_from_json(const json& j) {
  QuadratureSpec q;
  q.lo = detail::real(j, "lo", "quad");
  q.hi = detail::real(j, "hi", "quad");
  if (j.contains("nodes")) {
    if (!j["nodes"].is_number_integer()) {
      throw SchemaError("quad: field \"nodes\" must be an integer");
    }
    q.nodes = j["nodes"].get<int>();
  }
  q.validate();
  return q;
}

inline json to_json(const QuadratureSpec& q) {
  return {{"lo", number(q.lo)}, {"hi", number(q.hi)}, {"nodes", q.nodes}};
}

inline Distribution distribution_from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("distribution must be a JSON object");
  const json& type = detail::field(j, "type", "distribution");
  if (!type.is_string()) {
    throw SchemaError("distribution: \"type\" must be a string");
  }
  const std::string t = type.get<std::string>();
  std::optional<QuadratureSpec> quad;
  if (j.contains("quad")) quad = quadrature_from_json(j["quad"]);
  if (t == "discrete") {
    return Distribution::discrete(detail::reals(j, "support", "discrete"),
                                  detail::reals(j, "probs", "discrete"));
  }
  if (t == "bernoulli") {
    return Distribution::bernoulli(detail::real(j, "p", "bernoulli"));
  }
  if (t == "gaussian") {
    return Distribution::gaussian(detail::real(j, "mean", "gaussian"),
                                  detail::real(j, "sd", "gaussian"), quad);
  }
  if (t == "uniform") {
    return Distribution::uniform(detail::real(j, "lo", "uniform"),
                                 detail::real(j, "hi", "uniform"), quad);
  }
  throw SchemaError(str_cat("distribution: unknown type \"", t,
                            "\" (expected discrete, bernoulli, gaussian, "
                            "uniform)"));
}

inline json to_json(const Distribution& d) {
  json j;
  j["type"] = to_string(d.kind());
  const auto p = d.params();
  switch (d.kind()) {
    case DistKind::kDiscrete:
      j["support"] = numbers({d.support().begin(), d.support().end()});
      j["probs"] = numbers({d.probs().begin(), d.probs().end()});
      break;
    case DistKind::kBernoulli:
      j["p"] = number(p[0]);
      break;
    case DistKind::kGaussian:
      j["mean"] = number(p[0]);
      j["sd"] = number(p[1]);
      j["quad"] = to_json(d.quad());
      break;
    case DistKind::kUniform:
      j["lo"] = number(p[0]);
      j["hi"] = number(p[1]);
      j["quad"] = to_json(d.quad());
      break;
  }
  return j;
}

// {"null": <distribution>, "alt": <distribution>, "window": <quad>?}
inline HypothesisPair pair_from_json(const json& j) {
  const Distribution p0 =
      distribution_from_json(detail::field(j, "null", "pair"));
  const Distribution p1 = distribution_from_json(detail::field(j, "alt", "pair"));
  if (j.contains("window")) {
    return HypothesisPair(p0, p1, quadrature_from_json(j["window"]));
  }
  return HypothesisPair(p0, p1);
}

inline json to_json(const HypothesisPair& pair) {
  json j{{"null", to_json(pair.null_dist())}, {"alt", to_json(pair.alt_dist())}};
  if (pair.window()) j["window"] = to_json(*pair.window());
  return j;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError(str_cat("cannot open '", path, "'"));
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(str_cat(path, ": invalid JSON: ", e.what()));
  }
}

inline HypothesisPair read_pair(const std::string& path) {
  try {
    return pair_from_json(read_json_file(path));
  } catch (const json::exception& e) {
    throw SchemaError(str_cat(path, ": ", e.what()));
  }
}

}  // namespace evar::io

#endif  // EVAR_IO_HPP_
