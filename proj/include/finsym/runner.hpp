#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "finsym/check_record.hpp"
#include "finsym/config.hpp"
#include "finsym/curvature.hpp"
#include "finsym/errors.hpp"
#include "finsym/fedosov.hpp"
#include "finsym/finsler.hpp"
#include "finsym/symplectic.hpp"

namespace finsym {

struct CheckInfo {
  const char* id;
  const char* description;
};

/// Check families in report order.
inline const std::vector<CheckInfo>& check_catalog() {
  static const std::vector<CheckInfo> catalog{
      {"berwald-uniqueness", "max pairwise difference of induced connections across several vector fields"},
      {"bianchi", "first Bianchi identity of the induced curvature, its omega-contraction, and agreement of the "
                  "brace formula with the assembled curvature"},
      {"curvature", "induced curvature vs finite-difference commutator of the induced connection; last-pair "
                    "antisymmetry"},
      {"darboux", "coefficient relations of an omega-preserving connection in Darboux coordinates"},
      {"induce", "induced connection: symmetry, symplectic residual, and its identity with the Chern "
                 "preservation residual at y = W(x)"},
      {"metric-validity", "homogeneity, Euler identity, Cartan trace, positive-definite g, Randers one-form bound"},
      {"minkowski", "preservation of omega by a flat Chern connection, in the natural and the hatted chart"},
      {"pair-symmetry", "lowered curvature R_ijkl = R_jikl where the induced connection preserves omega"},
      {"preservation", "Chern connection preserves the lift of omega; closedness and nondegeneracy of omega; "
                       "Randers form of the condition"},
      {"structural", "Chern connection is torsion free and almost g-compatible"},
      {"transform", "chart change of the induced connection: round trip and symmetry"},
  };
  return catalog;
}

inline bool is_known_check(const std::string& id) {
  for (const auto& c : check_catalog())
    if (id == c.id) return true;
  return false;
}

/// Families that can run on this scenario (the default suite).
inline std::vector<std::string> applicable_checks(const ScenarioConfig& c) {
  std::vector<std::string> out;
  for (const auto& info : check_catalog()) {
    const std::string id = info.id;
    const bool needs_form = id == "preservation" || id == "induce" || id == "pair-symmetry";
    const bool needs_field = id == "induce" || id == "curvature" || id == "bianchi" || id == "pair-symmetry" ||
                             id == "berwald-uniqueness" || id == "transform";
    if (needs_form && !c.form) continue;
    if (needs_field && !c.field) continue;
    if (id == "darboux" && !(c.form && c.form->is_standard() && c.field)) continue;
    if (id == "transform" && !c.chart) continue;
    if (id == "minkowski" && !(c.chart && c.form && c.metric.family() == MetricFamily::custom)) continue;
    out.push_back(id);
  }
  return out;
}

/// Throws ConfigError if a requested family lacks the blocks it needs.
inline void require_checks(const ScenarioConfig& c, const std::vector<std::string>& suite) {
  if (suite.empty()) throw ConfigError("/suite", "empty check suite");
  for (const auto& id : suite) {
    if (!is_known_check(id)) throw ConfigError("/suite", "unknown check '" + id + "'");
    const bool form = id == "preservation" || id == "induce" || id == "pair-symmetry" || id == "darboux" ||
                      id == "minkowski";
    const bool field = id == "induce" || id == "curvature" || id == "bianchi" || id == "pair-symmetry" ||
                       id == "berwald-uniqueness" || id == "transform" || id == "darboux";
    if (form && !c.form) throw ConfigError("/two_form", "check '" + id + "' needs a two-form");
    if (field && !c.field) throw ConfigError("/vector_field", "check '" + id + "' needs a vector field");
    if (id == "darboux" && !c.form->is_standard())
      throw ConfigError("/two_form/type", "check 'darboux' needs the standard two-form");
    if ((id == "transform" || id == "minkowski") && !c.chart)
      throw ConfigError("/chart", "check '" + id + "' needs a chart");
  }
}

namespace runner_detail {

/// Uniform double in [0, 1) from the top 53 bits.
inline double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline std::vector<std::vector<double>> grid_points(const DomainBox& box, std::size_t count) {
  const std::size_t n = box.dimension();
  std::size_t k = 1;
  while (std::pow(static_cast<double>(k), static_cast<double>(n)) < static_cast<double>(count)) ++k;
  std::vector<std::vector<double>> out;
  std::vector<std::size_t> idx(n, 0);
  while (true) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& iv = box.intervals()[i];
      x[i] = iv.lower + (static_cast<double>(idx[i]) + 0.5) * (iv.upper - iv.lower) / static_cast<double>(k);
    }
    if (box.contains(x)) out.push_back(std::move(x));
    std::size_t d = 0;
    while (d < n && ++idx[d] == k) idx[d++] = 0;
    if (d == n) break;
  }
  return out;
}

inline std::vector<std::vector<double>> random_points(const DomainBox& box, std::size_t count, std::mt19937_64& rng) {
  std::vector<std::vector<double>> out;
  const std::size_t n = box.dimension();
  std::size_t attempts = 0;
  while (out.size() < count) {
    if (++attempts > 1000 * count) throw ConfigError("/sampling/box", "sampling box is almost entirely excluded");
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& iv = box.intervals()[i];
      x[i] = iv.lower + unit(rng) * (iv.upper - iv.lower);
    }
    if (box.contains(x)) out.push_back(std::move(x));
  }
  return out;
}

/// Random direction with Euclidean norm in [0.5, 2]: a point of the unit
/// ball (by rejection from the cube) rescaled.
inline std::vector<double> fiber_sample(std::size_t n, std::mt19937_64& rng) {
  std::vector<double> y(n);
  double r2 = 0.0;
  do {
    r2 = 0.0;
    for (double& v : y) {
      v = 2.0 * unit(rng) - 1.0;
      r2 += v * v;
    }
  } while (r2 > 1.0 || r2 < 1e-4);
  const double scale = (0.5 + 1.5 * unit(rng)) / std::sqrt(r2);
  for (double& v : y) v *= scale;
  return y;
}

}  // namespace runner_detail

/// Base points from the sampling block, each with y_per_x fiber samples.
/// Randomness comes from std::mt19937_64 seeded with sampling.seed (0 when
/// absent in grid mode).
inline std::vector<SamplePoint> sample_plan(const ScenarioConfig& c) {
  const DomainBox& box = c.sampling.box ? *c.sampling.box : c.metric.domain();
  std::mt19937_64 rng(c.sampling.seed.value_or(0));
  std::vector<std::vector<double>> xs = c.sampling.mode == SamplingMode::grid
                                            ? runner_detail::grid_points(box, c.sampling.count)
                                            : runner_detail::random_points(box, c.sampling.count, rng);
  std::vector<SamplePoint> plan;
  for (auto& x : xs) {
    SamplePoint sp{std::move(x), {}};
    for (std::size_t j = 0; j < c.sampling.y_per_x; ++j) sp.ys.push_back(runner_detail::fiber_sample(c.dimension, rng));
    plan.push_back(std::move(sp));
  }
  return plan;
}

/// Default vector fields for the uniqueness probe: W itself, the coordinate
/// fields, and the constant field (1, 2, ..., n).
inline std::vector<VectorFieldSpec> berwald_field_list(const ScenarioConfig& c) {
  if (!c.berwald_fields.empty()) return c.berwald_fields;
  const std::size_t n = c.dimension;
  std::vector<VectorFieldSpec> out{*c.field};
  std::vector<double> ramp(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> e(n, 0.0);
    e[i] = 1.0;
    out.push_back(VectorFieldSpec::constant(e));
    ramp[i] = static_cast<double>(i + 1);
  }
  out.push_back(VectorFieldSpec::constant(ramp));
  return out;
}

namespace runner_detail {

inline CheckRecord eval(const std::string& id, const std::vector<double>& point, double residual, double tol) {
  return CheckRecord::evaluate(id, point, residual, tol);
}

/// All records of the requested families at one sample.
inline std::vector<CheckRecord> records_at(const ScenarioConfig& c, const std::vector<std::string>& suite,
                                           const SamplePoint& sp) {
  auto wants = [&](const char* id) { return std::find(suite.begin(), suite.end(), id) != suite.end(); };
  const Tolerances& tol = c.tolerances;
  const std::vector<double>& x = sp.x;
  std::vector<CheckRecord> out;
  auto add = [&](const std::string& id, const std::vector<double>& p, auto&& fn) {
    out.push_back(detail::timed(id, p, fn));
  };

  if (wants("metric-validity"))
    for (auto& r : metric_validity(c.metric, {sp}, tol)) out.push_back(std::move(r));

  if (wants("structural"))
    for (const auto& y : sp.ys) {
      const auto p = join(x, y);
      add("structural.torsion", p, [&] {
        return eval("structural.torsion", p, chern_structural_residuals(c.metric, x, y).torsion, tol.torsion);
      });
      add("structural.compatibility", p, [&] {
        const auto s = chern_structural_residuals(c.metric, x, y);
        return eval("structural.compatibility", p, s.compatibility / s.scale, tol.compatibility);
      });
    }

  if (wants("preservation")) {
    const TwoFormField& w = *c.form;
    add("preservation.closedness", x,
        [&] { return eval("preservation.closedness", x, closedness_residual(w, x), tol.closedness); });
    add("preservation.nondegeneracy", x, [&] {
      // shortfall of |det omega| below tol_nd
      return eval("preservation.nondegeneracy", x, std::max(0.0, tol.tol_nd - nondegeneracy_check(w, x)), 0.0);
    });
    for (const auto& y : sp.ys) {
      const auto p = join(x, y);
      add("preservation.residual", p, [&] {
        return eval("preservation.residual", p, chern_preservation_residual(c.metric, w, x, y).max_abs,
                    tol.preservation);
      });
      if (c.metric.family() == MetricFamily::randers && w.source() == TwoFormField::Source::exterior_derivative)
        add("preservation.randers-equivalence", p, [&] {
          const auto rc = randers_preservation_condition(c.metric, x, y);
          const auto pr = chern_preservation_residual(c.metric, w, x, y);
          double d = 0.0;
          for (std::size_t k = 0; k < pr.entries.size(); ++k)
            d = std::max(d, std::abs(rc.general.flat()[k] + pr.entries.flat()[k]));
          return eval("preservation.randers-equivalence", p, d, tol.equivalence);
        });
    }
  }

  const bool need_gamma = wants("induce") || wants("darboux") || wants("transform") || wants("pair-symmetry");
  if (!need_gamma && !wants("curvature") && !wants("bianchi") && !wants("berwald-uniqueness") &&
      !wants("minkowski"))
    return out;

  // Whether the induced connection preserves omega at x; decides which
  // conditional checks assert a bound.
  auto preserving = [&]() {
    const ConnectionCoefficients g = induce_connection(c.metric, *c.field, x);
    return symplectic_connection_residual(g, *c.form, x) <= tol.preservation;
  };

  if (wants("induce")) {
    add("induce.exactness", x, [&] {
      const ConnectionCoefficients g = induce_connection(c.metric, *c.field, x);
      const std::vector<double> wx = vector_field_values(*c.field, x);
      const double a = symplectic_connection_residual(g, *c.form, x);
      const double b = chern_preservation_residual(c.metric, *c.form, x, wx).max_abs;
      return eval("induce.exactness", x, std::abs(a - b), tol.exactness);
    });
    add("induce.symmetry", x, [&] {
      return eval("induce.symmetry", x, induce_connection(c.metric, *c.field, x).asymmetry(), tol.torsion);
    });
    add("induce.symplectic", x, [&] {
      const ConnectionCoefficients g = induce_connection(c.metric, *c.field, x);
      return eval("induce.symplectic", x, symplectic_connection_residual(g, *c.form, x), tol.preservation);
    });
  }

  if (wants("darboux")) {
    // The relations are asserted only where the connection preserves omega.
    CheckRecord r = detail::timed("darboux", x, [&] {
      const ConnectionCoefficients g = induce_connection(c.metric, *c.field, x);
      const double d = darboux_relations_residual(g, c.dimension / 2).max;
      const bool hyp = symplectic_connection_residual(g, *c.form, x) <= tol.preservation;
      return eval(hyp ? "darboux" : "darboux.control", x, d, hyp ? tol.darboux : kNoBound);
    });
    out.push_back(std::move(r));
  }

  if (wants("transform")) {
    add("transform.roundtrip", x, [&] {
      const ConnectionCoefficients g = induce_connection(c.metric, *c.field, x);
      const ChartJacobians jac = chart_jacobians(*c.chart, x);
      const ConnectionCoefficients hat = transform_connection(g, jac);
      const ConnectionCoefficients back = transform_connection(hat, c.chart->inverted(), jac.xhat);
      return eval("transform.roundtrip", x, max_abs_diff(back.gamma, g.gamma) / std::max(1.0, max_abs(hat.gamma)),
                  tol.chart);
    });
    add("transform.symmetry", x, [&] {
      const ConnectionCoefficients g = induce_connection(c.metric, *c.field, x);
      return eval("transform.symmetry", x, transform_connection(g, *c.chart, x).asymmetry(), tol.torsion);
    });
  }

  if (wants("minkowski")) {
    add("minkowski.natural", x, [&] {
      return eval("minkowski.natural", x, minkowski_preservation_check(c.metric, *c.form, *c.chart, x).natural,
                  tol.minkowski);
    });
    add("minkowski.hatted", x, [&] {
      return eval("minkowski.hatted", x, minkowski_preservation_check(c.metric, *c.form, *c.chart, x).hatted,
                  tol.minkowski);
    });
    add("minkowski.equivalence", x, [&] {
      // hatted condition vs preservation in the hatted chart with the
      // transformed (zero) connection
      minkowski_preservation_check(c.metric, *c.form, *c.chart, x);
      const ChartJacobians jac = chart_jacobians(*c.chart, x);
      const Tensor3<double> terms = minkowski_hatted_terms(*c.form, jac, x);
      const HattedForm h = hatted_two_form(*c.form, jac, x);
      const ConnectionCoefficients ghat = transform_connection(ConnectionCoefficients::zero(c.dimension), jac);
      const Tensor3<double> pres = preservation_tensor(h.values, h.derivatives, ghat.gamma);
      double d = 0.0;
      for (std::size_t k = 0; k < terms.size(); ++k) d = std::max(d, std::abs(terms.flat()[k] + pres.flat()[k]));
      return eval("minkowski.equivalence", x, d, tol.minkowski);
    });
  }

  if (wants("berwald-uniqueness"))
    add("berwald-uniqueness", x, [&] {
      return eval("berwald-uniqueness", x, berwald_uniqueness_probe(c.metric, x, berwald_field_list(c)),
                  tol.berwald);
    });

  if (!c.field) return out;
  const FedosovScenario scenario(c.metric, c.form, *c.field);

  if (wants("curvature")) {
    add("curvature.fd-agreement", x, [&] {
      const CurvatureAtPoint r = curvature_induced(scenario, x);
      const CurvatureAtPoint f = curvature_by_finite_differences(scenario, x);
      return eval("curvature.fd-agreement", x, max_abs_diff(r.up, f.up) / std::max(r.scale, f.scale),
                  tol.curvature_fd);
    });
    add("curvature.antisymmetry", x, [&] {
      const CurvatureAtPoint r = curvature_induced(scenario, x);
      const std::size_t n = c.dimension;
      double a = 0.0;
      for (std::size_t l = 0; l < n; ++l)
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) a = std::max(a, std::abs(r.up(l, i, j, k) + r.up(l, i, k, j)));
      return eval("curvature.antisymmetry", x, a, tol.torsion);
    });
  }

  if (wants("bianchi")) {
    add("bianchi.first", x, [&] {
      const CurvatureAtPoint r = curvature_induced(scenario, x);
      return eval("bianchi.first", x, first_bianchi_residual(r.up) / r.scale, tol.bianchi);
    });
    if (c.form) {
      add("bianchi.contracted", x, [&] {
        const BianchiResidual b = bianchi_contracted_residual(scenario, x);
        return eval("bianchi.contracted", x, b.assembled / b.scale, tol.bianchi);
      });
      add("bianchi.two-path", x, [&] {
        return eval("bianchi.two-path", x, bianchi_contracted_residual(scenario, x).two_path, tol.two_path);
      });
    }
  }

  if (wants("pair-symmetry")) {
    out.push_back(detail::timed("pair-symmetry.lowered", x, [&] {
      const PairSymmetryResidual p = pair_symmetry_residual(scenario, x);
      return preserving() ? eval("pair-symmetry.lowered", x, p.lowered / p.scale, tol.pair_symmetry)
                          : eval("pair-symmetry.control", x, p.lowered / p.scale, kNoBound);
    }));
    add("pair-symmetry.two-path", x, [&] {
      return eval("pair-symmetry.two-path", x, pair_symmetry_residual(scenario, x).two_path, tol.two_path);
    });
  }
  return out;
}

}  // namespace runner_detail

struct RunOptions {
  unsigned threads = 1;
  bool timing = false;  // keep measured durations; otherwise report 0 so output is reproducible
};

/// Evaluates the suite at every sample. Records are ordered by check id,
/// then by sample index; evaluation errors become failing records.
inline std::vector<CheckRecord> run_scenario(const ScenarioConfig& c, std::vector<std::string> suite,
                                             const RunOptions& opt = {}) {
  require_checks(c, suite);
  const std::vector<SamplePoint> plan = sample_plan(c);
  std::vector<std::vector<CheckRecord>> slots(plan.size());

  auto work = [&](std::size_t i) {
    try {
      slots[i] = runner_detail::records_at(c, suite, plan[i]);
    } catch (const Error& e) {
      slots[i] = {CheckRecord::failure("scenario", plan[i].x, e.what())};
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(opt.threads, static_cast<unsigned>(plan.size())));
  if (threads == 1) {
    for (std::size_t i = 0; i < plan.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < plan.size(); i = next++) work(i);
      });
    for (auto& t : pool) t.join();
  }

  std::vector<CheckRecord> out;
  for (auto& s : slots)
    for (auto& r : s) out.push_back(std::move(r));
  std::stable_sort(out.begin(), out.end(), [](const CheckRecord& a, const CheckRecord& b) { return a.check < b.check; });
  if (!opt.timing)
    for (auto& r : out) r.elapsed = std::chrono::microseconds{0};
  return out;
}

inline bool all_pass(const std::vector<CheckRecord>& records) {
  return std::all_of(records.begin(), records.end(), [](const CheckRecord& r) { return r.pass; });
}

}  // namespace finsym
