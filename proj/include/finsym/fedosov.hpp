#pragma once

/// The symplectic connection induced by the Chern connection along a
/// nowhere-zero vector field, Gamma^k_ij(x) = Chern^k_ij(x, W(x)), with checks
/// for the symplectic, Darboux-coordinate and chart-transformation properties.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "finsym/errors.hpp"
#include "finsym/fields.hpp"
#include "finsym/finsler.hpp"
#include "finsym/symplectic.hpp"
#include "finsym/tensor.hpp"

namespace finsym {

/// Coefficients Gamma^k_ij at one point, stored as (k, i, j).
struct ConnectionCoefficients {
  Tensor3<double> gamma;
  bool symmetric = false;

  std::size_t dimension() const noexcept { return gamma.dim(); }
  double operator()(std::size_t k, std::size_t i, std::size_t j) const { return gamma(k, i, j); }

  static ConnectionCoefficients zero(std::size_t n) { return {Tensor3<double>(n, 0.0), true}; }

  /// max |Gamma^k_ij - Gamma^k_ji|.
  double asymmetry() const {
    const std::size_t n = dimension();
    double a = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a = std::max(a, std::abs(gamma(k, i, j) - gamma(k, j, i)));
    return a;
  }
};

/// A Finsler metric with an optional symplectic form and the vector field
/// that selects the induced connection.
struct FedosovScenario {
  MetricSpec metric;
  std::optional<TwoFormField> form;
  VectorFieldSpec field;

  FedosovScenario(MetricSpec m, std::optional<TwoFormField> w, VectorFieldSpec f)
      : metric(std::move(m)), form(std::move(w)), field(std::move(f)) {
    if (field.dimension() != metric.dimension())
      throw DimensionMismatchError("vector field and metric dimensions differ");
    if (form) {
      if (form->dimension() != metric.dimension()) throw DimensionMismatchError("two-form and metric dimensions differ");
      if (form->dimension() % 2 != 0) throw OddDimensionError("symplectic scenarios need an even dimension");
    }
  }

  const TwoFormField& two_form() const {
    if (!form) throw DimensionMismatchError("scenario has no two-form");
    return *form;
  }
};

inline ConnectionCoefficients induce_connection(const MetricSpec& m, const VectorFieldSpec& w,
                                                std::span<const double> x) {
  if (x.size() != m.dimension()) throw DimensionMismatchError("point and metric dimensions differ");
  const std::vector<double> wx = vector_field_values(w, x);
  return {chern_coefficients(m, x, wx), true};
}

inline ConnectionCoefficients induce_connection(const FedosovScenario& s, std::span<const double> x) {
  return induce_connection(s.metric, s.field, x);
}

/// max over (k, i, j) of |d_k w_ij - (Gamma^l_ki w_lj + Gamma^l_kj w_il)|.
inline double symplectic_connection_residual(const ConnectionCoefficients& c, const TwoFormField& w,
                                             std::span<const double> x) {
  const std::size_t n = c.dimension();
  if (w.dimension() != n) throw DimensionMismatchError("connection and two-form dimensions differ");
  const auto [v, d] = w.values_and_derivatives(x);
  double r = 0.0;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t l = 0; l < n; ++l) s += c(l, k, i) * v(l, j) + c(l, k, j) * v(i, l);
        r = std::max(r, std::abs(d(k, i, j) - s));
      }
  return r;
}

struct DarbouxResidual {
  // Relations with 1-based indices i, j in [1, 2n], for all k:
  //   [0] i <= n, j <= n:  Gamma^(i+n)_kj =  Gamma^(j+n)_ki
  //   [1] i <= n, j >  n:  Gamma^(i+n)_kj = -Gamma^(j-n)_ki
  //   [2] i >  n, j <= n:  Gamma^(i-n)_kj = -Gamma^(j+n)_ki
  //   [3] i >  n, j >  n:  Gamma^(i-n)_kj =  Gamma^(j-n)_ki
  std::array<double, 4> family{};
  double max = 0.0;
};

/// Violation of the coefficient relations that hold for a connection
/// preserving sum_i dx^i ^ dx^(n+i).
inline DarbouxResidual darboux_relations_residual(const ConnectionCoefficients& c, std::size_t half_dim) {
  const std::size_t n = half_dim;
  if (c.dimension() != 2 * n) throw DimensionMismatchError("connection dimension is not 2n");
  DarbouxResidual r;
  // 0-based: partner(i) = i + n on the first half, i - n on the second.
  auto partner = [n](std::size_t i) { return i < n ? i + n : i - n; };
  for (std::size_t k = 0; k < 2 * n; ++k)
    for (std::size_t i = 0; i < 2 * n; ++i)
      for (std::size_t j = 0; j < 2 * n; ++j) {
        const bool i_low = i < n;
        const bool j_low = j < n;
        const double sign = i_low == j_low ? 1.0 : -1.0;
        const std::size_t fam = (i_low ? 0 : 2) + (j_low ? 0 : 1);
        const double v = std::abs(c(partner(i), k, j) - sign * c(partner(j), k, i));
        r.family[fam] = std::max(r.family[fam], v);
      }
  r.max = *std::max_element(r.family.begin(), r.family.end());
  return r;
}

/// Coefficients in the hatted chart at x^(x):
///   G^p_qr = d_i x^p (d^_q d^_r x^i + Gamma^i_jk d^_q x^j d^_r x^k)
inline ConnectionCoefficients transform_connection(const ConnectionCoefficients& c, const ChartJacobians& jac) {
  const std::size_t n = c.dimension();
  if (jac.forward.dim() != n) throw DimensionMismatchError("connection and chart dimensions differ");
  ConnectionCoefficients out{Tensor3<double>(n, 0.0), c.symmetric};
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q)
      for (std::size_t r = c.symmetric ? q : 0; r < n; ++r) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          double inner = jac.inverse_second(i, q, r);
          for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) inner += c(i, j, k) * jac.inverse(j, q) * jac.inverse(k, r);
          s += jac.forward(p, i) * inner;
        }
        out.gamma(p, q, r) = s;
        if (c.symmetric) out.gamma(p, r, q) = s;
      }
  return out;
}

inline ConnectionCoefficients transform_connection(const ConnectionCoefficients& c, const ChartMap& map,
                                                   std::span<const double> x) {
  return transform_connection(c, chart_jacobians(map, x));
}

/// Components of a two-form in the hatted chart at x^(x), with derivatives
/// (k, i, j) = d^_k w^_ij.
struct HattedForm {
  std::vector<double> xhat;
  Matrix<double> values;
  Tensor3<double> derivatives;
};

/// w^_ij = w_ab d^_i x^a d^_j x^b, differentiated by the chain rule.
inline HattedForm hatted_two_form(const TwoFormField& w, const ChartJacobians& jac, std::span<const double> x) {
  const std::size_t n = w.dimension();
  const auto [v, d] = w.values_and_derivatives(x);
  HattedForm h{jac.xhat, Matrix<double>(n, 0.0), Tensor3<double>(n, 0.0)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) s += v(a, b) * jac.inverse(a, i) * jac.inverse(b, j);
      h.values(i, j) = s;
      for (std::size_t k = 0; k < n; ++k) {
        double t = 0.0;
        for (std::size_t a = 0; a < n; ++a)
          for (std::size_t b = 0; b < n; ++b) {
            double dwab = 0.0;  // d^_k of w_ab(x(x^))
            for (std::size_t c = 0; c < n; ++c) dwab += d(c, a, b) * jac.inverse(c, k);
            t += dwab * jac.inverse(a, i) * jac.inverse(b, j) +
                 v(a, b) * jac.inverse_second(a, k, i) * jac.inverse(b, j) +
                 v(a, b) * jac.inverse(a, i) * jac.inverse_second(b, k, j);
          }
        h.derivatives(k, i, j) = t;
      }
    }
  return h;
}

/// Entry (k, i, j) of
///   d_h x^l d^_k d^_i x^h w^_lj + d_h x^l d^_k d^_j x^h w^_il - d^_k w^_ij,
/// the hatted-chart preservation condition for a metric whose Chern
/// coefficients vanish in the natural chart.
inline Tensor3<double> minkowski_hatted_terms(const TwoFormField& w, const ChartJacobians& jac,
                                              std::span<const double> x) {
  const std::size_t n = w.dimension();
  const HattedForm h = hatted_two_form(w, jac, x);
  Tensor3<double> out(n, 0.0);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double s = -h.derivatives(k, i, j);
        for (std::size_t l = 0; l < n; ++l)
          for (std::size_t hh = 0; hh < n; ++hh)
            s += jac.forward(l, hh) * jac.inverse_second(hh, k, i) * h.values(l, j) +
                 jac.forward(l, hh) * jac.inverse_second(hh, k, j) * h.values(i, l);
        out(k, i, j) = s;
      }
  return out;
}

struct MinkowskiResidual {
  double natural = 0.0;  // max |d_k w_ij| in the natural chart
  double hatted = 0.0;   // max |minkowski_hatted_terms|
};

inline constexpr double kMinkowskiChernTolerance = 1e-8;

/// Fiber directions used to confirm that the Chern coefficients vanish: the
/// cyclic shifts of (1, 2, ..., n) and one alternating-sign vector. No
/// component is zero, so metrics degenerate on the coordinate axes (such as
/// (y1^4 + y2^4)^(1/4)) can still be probed.
inline std::vector<std::vector<double>> default_probe_directions(std::size_t n) {
  std::vector<std::vector<double>> ys;
  for (std::size_t a = 0; a < n; ++a) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(1 + (i + a) % n);
    ys.push_back(v);
  }
  std::vector<double> alt(n);
  for (std::size_t i = 0; i < n; ++i) alt[i] = i % 2 == 0 ? 1.0 : -0.5;
  ys.push_back(alt);
  return ys;
}

inline MinkowskiResidual minkowski_preservation_check(const MetricSpec& m, const TwoFormField& w, const ChartMap& map,
                                                      std::span<const double> x,
                                                      const std::vector<std::vector<double>>& ys = {}) {
  const std::size_t n = m.dimension();
  if (w.dimension() != n || map.dimension() != n) throw DimensionMismatchError("scenario dimensions differ");
  for (const auto& y : ys.empty() ? default_probe_directions(n) : ys)
    if (max_abs(chern_coefficients(m, x, y)) > kMinkowskiChernTolerance)
      throw NotMinkowskianError("Chern coefficients do not vanish in the natural chart");
  const auto [v, d] = w.values_and_derivatives(x);
  const ChartJacobians jac = chart_jacobians(map, x);
  return {max_abs(d), max_abs(minkowski_hatted_terms(w, jac, x))};
}

/// Max pairwise difference between the connections induced by each field.
inline double berwald_uniqueness_probe(const MetricSpec& m, std::span<const double> x,
                                       const std::vector<VectorFieldSpec>& fields) {
  if (fields.size() < 2) throw ZeroVectorError("uniqueness probe needs at least two vector fields");
  std::vector<ConnectionCoefficients> c;
  for (const auto& w : fields) c.push_back(induce_connection(m, w, x));
  double d = 0.0;
  for (std::size_t a = 0; a < c.size(); ++a)
    for (std::size_t b = a + 1; b < c.size(); ++b) d = std::max(d, max_abs_diff(c[a].gamma, c[b].gamma));
  return d;
}

inline double berwald_uniqueness_probe(const FedosovScenario& s, std::span<const double> x,
                                       const std::vector<VectorFieldSpec>& fields) {
  return berwald_uniqueness_probe(s.metric, x, fields);
}

}  // namespace finsym
