#pragma once

/// Scenario documents (JSON). Schema, with x1..xn as base coordinates and
/// y1..yn as fiber coordinates in expressions:
///
///   {
///     "name": "...",                                   optional
///     "dimension": n,
///     "metric": {
///       "family": "riemannian" | "randers" | "custom",
///       "g": [[expr]],             riemannian, n x n symmetric
///       "a": [[expr]], "b": [expr] randers
///       "F": expr                  custom, over x and y
///       "domain": box,             optional, default unbounded
///       "y_min": number            optional
///     },
///     "two_form": {                                    optional
///       "type": "standard" | "randers-dbeta" | "explicit",
///       "entries": [{"i": 1, "j": 2, "value": expr}]   explicit only, 1-based, i < j
///     },
///     "vector_field": {"components": [expr], "w_min": number},   optional
///     "berwald_fields": [[expr]],                      optional
///     "chart": {"forward": [expr], "inverse": [expr],
///               "forward_domain": box, "inverse_domain": box},    optional
///     "sampling": {"mode": "grid" | "random", "count": k, "seed": s,
///                  "y_per_x": m, "box": box},
///     "tolerances": {"name": number}
///   }
///
/// where box = {"lower": [..], "upper": [..], "exclude": [{"center": [..], "radius": r}]}.
/// Every schema violation raises ConfigError with a JSON-pointer path.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "finsym/check_record.hpp"
#include "finsym/domain.hpp"
#include "finsym/errors.hpp"
#include "finsym/expression.hpp"
#include "finsym/fields.hpp"
#include "finsym/finsler.hpp"
#include "finsym/symplectic.hpp"

namespace finsym {

enum class SamplingMode { grid, random };

struct SamplingSpec {
  SamplingMode mode = SamplingMode::grid;
  std::size_t count = 100;
  std::optional<std::uint64_t> seed;
  std::size_t y_per_x = 2;
  std::optional<DomainBox> box;  // defaults to the metric domain
};

struct ScenarioConfig {
  std::string name;
  std::size_t dimension = 0;
  MetricSpec metric;
  std::optional<TwoFormField> form;
  std::optional<VectorFieldSpec> field;
  std::vector<VectorFieldSpec> berwald_fields;
  std::optional<ChartMap> chart;
  SamplingSpec sampling;
  Tolerances tolerances;
};

namespace config_detail {

using json = nlohmann::json;

[[noreturn]] inline void fail(const std::string& path, const std::string& message) {
  throw ConfigError(path.empty() ? "/" : path, message);
}

inline const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path + "/" + key, "missing required field");
  return *it;
}

inline const json* optional(const json& obj, const std::string& key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

inline void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* a : allowed) known = known || it.key() == a;
    if (!known) fail(path + "/" + it.key(), "unknown field");
  }
}

inline std::string get_string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

inline double get_number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

inline std::uint64_t get_unsigned(const json& v, const std::string& path) {
  if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
    fail(path, "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

inline std::vector<double> get_numbers(const json& v, const std::string& path, std::size_t n) {
  if (!v.is_array() || v.size() != n) fail(path, "expected an array of " + std::to_string(n) + " numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(get_number(v[i], path + "/" + std::to_string(i)));
  return out;
}

inline std::vector<std::string> get_strings(const json& v, const std::string& path, std::size_t n) {
  if (!v.is_array() || v.size() != n) fail(path, "expected an array of " + std::to_string(n) + " expressions");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(get_string(v[i], path + "/" + std::to_string(i)));
  return out;
}

inline std::vector<std::vector<std::string>> get_string_matrix(const json& v, const std::string& path,
                                                               std::size_t n) {
  if (!v.is_array() || v.size() != n) fail(path, "expected " + std::to_string(n) + " rows");
  std::vector<std::vector<std::string>> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(get_strings(v[i], path + "/" + std::to_string(i), n));
  return out;
}

/// Parses one expression, reporting the JSON path of a syntax error.
inline ScalarField expression(const std::string& text, const std::vector<std::string>& names,
                              const std::string& path) {
  try {
    return parse_field(text, names);
  } catch (const ParseError& e) {
    fail(path, e.what());
  }
}

inline void check_expressions(const std::vector<std::string>& texts, const std::vector<std::string>& names,
                              const std::string& path) {
  for (std::size_t i = 0; i < texts.size(); ++i) expression(texts[i], names, path + "/" + std::to_string(i));
}

inline DomainBox domain(const json& v, const std::string& path, std::size_t n) {
  if (!v.is_object()) fail(path, "expected an object");
  reject_unknown(v, path, {"lower", "upper", "exclude"});
  const auto lo = get_numbers(require(v, "lower", path), path + "/lower", n);
  const auto hi = get_numbers(require(v, "upper", path), path + "/upper", n);
  std::vector<DomainBox::Interval> iv;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(lo[i] < hi[i])) fail(path + "/upper/" + std::to_string(i), "upper bound must exceed lower bound");
    iv.push_back({lo[i], hi[i]});
  }
  std::vector<DomainBox::Ball> balls;
  if (const json* ex = optional(v, "exclude")) {
    if (!ex->is_array()) fail(path + "/exclude", "expected an array");
    for (std::size_t b = 0; b < ex->size(); ++b) {
      const std::string bp = path + "/exclude/" + std::to_string(b);
      reject_unknown((*ex)[b], bp, {"center", "radius"});
      const auto c = get_numbers(require((*ex)[b], "center", bp), bp + "/center", n);
      const double r = get_number(require((*ex)[b], "radius", bp), bp + "/radius");
      if (!(r >= 0.0)) fail(bp + "/radius", "radius must be non-negative");
      balls.push_back({c, r});
    }
  }
  return DomainBox(std::move(iv), std::move(balls));
}

inline MetricSpec metric(const json& v, std::size_t n) {
  const std::string path = "/metric";
  if (!v.is_object()) fail(path, "expected an object");
  reject_unknown(v, path, {"family", "g", "a", "b", "F", "domain", "y_min"});
  const std::string family = get_string(require(v, "family", path), path + "/family");
  const DomainBox box = optional(v, "domain") ? domain(v["domain"], path + "/domain", n) : DomainBox::whole(n);
  double y_min = kDefaultMinFiberNorm;
  if (const json* y = optional(v, "y_min")) {
    y_min = get_number(*y, path + "/y_min");
    if (!(y_min > 0.0)) fail(path + "/y_min", "must be positive");
  }
  const auto names = coordinate_names(n);
  try {
    if (family == "riemannian") {
      const auto g = get_string_matrix(require(v, "g", path), path + "/g", n);
      for (std::size_t i = 0; i < n; ++i) check_expressions(g[i], names, path + "/g/" + std::to_string(i));
      return MetricSpec::parse_riemannian(g, box, y_min);
    }
    if (family == "randers") {
      const auto a = get_string_matrix(require(v, "a", path), path + "/a", n);
      for (std::size_t i = 0; i < n; ++i) check_expressions(a[i], names, path + "/a/" + std::to_string(i));
      const auto b = get_strings(require(v, "b", path), path + "/b", n);
      check_expressions(b, names, path + "/b");
      return MetricSpec::parse_randers(a, b, box, y_min);
    }
    if (family == "custom") {
      const std::string f = get_string(require(v, "F", path), path + "/F");
      expression(f, coordinate_names(n, true), path + "/F");
      return MetricSpec::parse_custom(f, n, box, y_min);
    }
  } catch (const InvalidMetricError& e) {
    fail(path, e.what());
  }
  fail(path + "/family", "expected riemannian, randers or custom");
}

inline TwoFormField two_form(const json& v, std::size_t n, const MetricSpec& m) {
  const std::string path = "/two_form";
  if (!v.is_object()) fail(path, "expected an object");
  reject_unknown(v, path, {"type", "entries"});
  const std::string type = get_string(require(v, "type", path), path + "/type");
  if (type == "standard") {
    if (n % 2 != 0) fail("/dimension", "standard two-form needs an even dimension, got " + std::to_string(n));
    return TwoFormField::standard(n / 2);
  }
  if (n % 2 != 0) fail("/dimension", "a symplectic form needs an even dimension, got " + std::to_string(n));
  if (type == "randers-dbeta") {
    if (m.family() != MetricFamily::randers) fail(path + "/type", "randers-dbeta needs a randers metric");
    return TwoFormField::exterior_derivative(m.covector());
  }
  if (type == "explicit") {
    const json& entries = require(v, "entries", path);
    if (!entries.is_array()) fail(path + "/entries", "expected an array");
    std::map<std::pair<std::size_t, std::size_t>, ScalarField> upper;
    for (std::size_t e = 0; e < entries.size(); ++e) {
      const std::string ep = path + "/entries/" + std::to_string(e);
      reject_unknown(entries[e], ep, {"i", "j", "value"});
      const auto i = get_unsigned(require(entries[e], "i", ep), ep + "/i");
      const auto j = get_unsigned(require(entries[e], "j", ep), ep + "/j");
      if (i < 1 || j <= i || j > n) fail(ep, "indices must satisfy 1 <= i < j <= dimension");
      const auto key = std::pair<std::size_t, std::size_t>{i - 1, j - 1};
      if (upper.count(key)) fail(ep, "duplicate entry");
      upper.emplace(key, expression(get_string(require(entries[e], "value", ep), ep + "/value"), coordinate_names(n),
                                    ep + "/value"));
    }
    return TwoFormField::from_entries(n, std::move(upper));
  }
  fail(path + "/type", "expected standard, randers-dbeta or explicit");
}

inline VectorFieldSpec vector_field(const json& v, std::size_t n, const std::string& path) {
  if (!v.is_object()) fail(path, "expected an object");
  reject_unknown(v, path, {"components", "w_min"});
  const auto comps = get_strings(require(v, "components", path), path + "/components", n);
  check_expressions(comps, coordinate_names(n), path + "/components");
  double w_min = kDefaultMinVectorNorm;
  if (const json* w = optional(v, "w_min")) {
    w_min = get_number(*w, path + "/w_min");
    if (!(w_min > 0.0)) fail(path + "/w_min", "must be positive");
  }
  return VectorFieldSpec::parse(comps, w_min);
}

inline ChartMap chart(const json& v, std::size_t n) {
  const std::string path = "/chart";
  if (!v.is_object()) fail(path, "expected an object");
  reject_unknown(v, path, {"forward", "inverse", "forward_domain", "inverse_domain"});
  const auto names = coordinate_names(n);
  const auto fwd = get_strings(require(v, "forward", path), path + "/forward", n);
  const auto inv = get_strings(require(v, "inverse", path), path + "/inverse", n);
  check_expressions(fwd, names, path + "/forward");
  check_expressions(inv, names, path + "/inverse");
  const DomainBox fd =
      optional(v, "forward_domain") ? domain(v["forward_domain"], path + "/forward_domain", n) : DomainBox::whole(n);
  const DomainBox id =
      optional(v, "inverse_domain") ? domain(v["inverse_domain"], path + "/inverse_domain", n) : DomainBox::whole(n);
  return ChartMap::parse(fwd, inv, fd, id);
}

inline SamplingSpec sampling(const json* v, std::size_t n, const DomainBox& metric_domain) {
  const std::string path = "/sampling";
  SamplingSpec s;
  if (v) {
    if (!v->is_object()) fail(path, "expected an object");
    reject_unknown(*v, path, {"mode", "count", "seed", "y_per_x", "box"});
    if (const json* m = optional(*v, "mode")) {
      const std::string mode = get_string(*m, path + "/mode");
      if (mode == "grid")
        s.mode = SamplingMode::grid;
      else if (mode == "random")
        s.mode = SamplingMode::random;
      else
        fail(path + "/mode", "expected grid or random");
    }
    if (const json* c = optional(*v, "count")) {
      s.count = get_unsigned(*c, path + "/count");
      if (s.count == 0) fail(path + "/count", "must be positive");
    }
    if (const json* c = optional(*v, "seed")) s.seed = get_unsigned(*c, path + "/seed");
    if (const json* c = optional(*v, "y_per_x")) {
      s.y_per_x = get_unsigned(*c, path + "/y_per_x");
      if (s.y_per_x == 0) fail(path + "/y_per_x", "must be positive");
    }
    if (const json* b = optional(*v, "box")) s.box = domain(*b, path + "/box", n);
  }
  if (s.mode == SamplingMode::random && !s.seed) fail(path + "/seed", "random sampling needs a seed");
  const DomainBox& box = s.box ? *s.box : metric_domain;
  for (const auto& iv : box.intervals())
    if (!std::isfinite(iv.lower) || !std::isfinite(iv.upper))
      fail(path + "/box", "sampling needs a bounded box; set sampling.box or metric.domain");
  return s;
}

}  // namespace config_detail

inline ScenarioConfig parse_scenario(const nlohmann::json& doc) {
  using namespace config_detail;
  if (!doc.is_object()) fail("", "scenario document must be an object");
  reject_unknown(doc, "", {"name", "dimension", "metric", "two_form", "vector_field", "berwald_fields", "chart",
                           "sampling", "tolerances"});
  const std::uint64_t n64 = get_unsigned(require(doc, "dimension", ""), "/dimension");
  if (n64 < 1 || n64 > 8) fail("/dimension", "dimension must be between 1 and 8");
  const std::size_t n = n64;

  MetricSpec m = metric(require(doc, "metric", ""), n);
  ScenarioConfig c{optional(doc, "name") ? get_string(doc["name"], "/name") : std::string{},
                   n,
                   m,
                   std::nullopt,
                   std::nullopt,
                   {},
                   std::nullopt,
                   {},
                   {}};
  if (const json* w = optional(doc, "two_form")) c.form = two_form(*w, n, m);
  if (const json* f = optional(doc, "vector_field")) c.field = vector_field(*f, n, "/vector_field");
  if (const json* b = optional(doc, "berwald_fields")) {
    if (!b->is_array()) fail("/berwald_fields", "expected an array");
    for (std::size_t i = 0; i < b->size(); ++i) {
      const std::string bp = "/berwald_fields/" + std::to_string(i);
      const auto comps = get_strings((*b)[i], bp, n);
      check_expressions(comps, coordinate_names(n), bp);
      c.berwald_fields.push_back(VectorFieldSpec::parse(comps));
    }
  }
  if (const json* ch = optional(doc, "chart")) c.chart = chart(*ch, n);
  c.sampling = sampling(optional(doc, "sampling"), n, m.domain());
  if (const json* t = optional(doc, "tolerances")) {
    if (!t->is_object()) fail("/tolerances", "expected an object");
    for (auto it = t->begin(); it != t->end(); ++it) {
      const std::string tp = "/tolerances/" + it.key();
      const double v = get_number(it.value(), tp);
      if (!(v >= 0.0)) fail(tp, "tolerance must be non-negative");
      if (!c.tolerances.set(it.key(), v)) fail(tp, "unknown tolerance name");
    }
  }
  return c;
}

inline ScenarioConfig parse_scenario_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("/", std::string("invalid JSON: ") + e.what());
  }
  return parse_scenario(doc);
}

inline ScenarioConfig load_scenario(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("/", "cannot read " + file);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario_text(ss.str());
}

}  // namespace finsym
