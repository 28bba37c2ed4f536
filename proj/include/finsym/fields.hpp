#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "finsym/domain.hpp"
#include "finsym/errors.hpp"
#include "finsym/expression.hpp"
#include "finsym/jet.hpp"
#include "finsym/tensor.hpp"

namespace finsym {

inline constexpr double kDefaultMinVectorNorm = 1e-6;

/// A vector field W = W^p d_p on a chart, required to stay at least `w_min`
/// away from zero wherever it is evaluated.
struct VectorFieldSpec {
  std::vector<ScalarField> components;
  double w_min = kDefaultMinVectorNorm;

  std::size_t dimension() const noexcept { return components.size(); }

  static VectorFieldSpec parse(const std::vector<std::string>& texts, double w_min = kDefaultMinVectorNorm) {
    VectorFieldSpec w;
    w.w_min = w_min;
    const auto names = coordinate_names(texts.size());
    for (const auto& t : texts) w.components.push_back(parse_field(t, names));
    return w;
  }

  /// Constant field with the given components.
  static VectorFieldSpec constant(std::span<const double> values, double w_min = kDefaultMinVectorNorm) {
    VectorFieldSpec w;
    w.w_min = w_min;
    const auto names = coordinate_names(values.size());
    for (double v : values) w.components.push_back(ScalarField::constant(v, names));
    return w;
  }
};

namespace detail {
inline void require_nonzero(const VectorFieldSpec& w, std::span<const double> values) {
  double n2 = 0.0;
  for (double v : values) n2 += v * v;
  if (!(std::sqrt(n2) >= w.w_min))
    throw ZeroVectorError("vector field norm " + std::to_string(std::sqrt(n2)) + " below floor " +
                          std::to_string(w.w_min));
}
}  // namespace detail

/// Component jets of W at x (up to order 2), after the nowhere-zero check.
inline std::vector<Jet> eval_vector_field(const VectorFieldSpec& w, std::span<const double> x, int order) {
  if (order > 2) throw OrderError("vector fields are evaluated to order 2 at most");
  if (x.size() != w.dimension()) throw DimensionMismatchError("vector field and point dimensions differ");
  const std::vector<Jet> vars = jet_variables(x, order);
  std::vector<Jet> out;
  std::vector<double> values;
  for (const auto& c : w.components) {
    out.push_back(c(std::span<const Jet>(vars)));
    if (!out.back().is_finite()) throw DomainError("vector field not finite");
    values.push_back(out.back().value());
  }
  detail::require_nonzero(w, values);
  return out;
}

inline std::vector<double> vector_field_values(const VectorFieldSpec& w, std::span<const double> x) {
  if (x.size() != w.dimension()) throw DimensionMismatchError("vector field and point dimensions differ");
  std::vector<double> values;
  for (const auto& c : w.components) values.push_back(c(x));
  detail::require_nonzero(w, values);
  return values;
}

/// A pair of coordinate systems on one chart: forward components x^(p)(x)
/// and user-supplied inverse components x^i(x^). Inverse expressions use the
/// names x1..xn for the hatted coordinates.
struct ChartMap {
  std::vector<ScalarField> forward;
  std::vector<ScalarField> inverse;
  DomainBox forward_domain;
  DomainBox inverse_domain;

  std::size_t dimension() const noexcept { return forward.size(); }

  static ChartMap parse(const std::vector<std::string>& forward_texts, const std::vector<std::string>& inverse_texts,
                        DomainBox forward_domain, DomainBox inverse_domain) {
    if (forward_texts.size() != inverse_texts.size())
      throw DimensionMismatchError("chart forward and inverse dimensions differ");
    ChartMap m;
    const auto names = coordinate_names(forward_texts.size());
    for (const auto& t : forward_texts) m.forward.push_back(parse_field(t, names));
    for (const auto& t : inverse_texts) m.inverse.push_back(parse_field(t, names));
    m.forward_domain = std::move(forward_domain);
    m.inverse_domain = std::move(inverse_domain);
    return m;
  }

  static ChartMap identity(std::size_t n) {
    std::vector<std::string> names = coordinate_names(n);
    return parse(names, names, DomainBox::whole(n), DomainBox::whole(n));
  }

  /// x^ = A x with the supplied inverse matrix (row-major, n*n each).
  static ChartMap linear(const Matrix<double>& a, const Matrix<double>& a_inv) {
    const std::size_t n = a.dim();
    const auto names = coordinate_names(n);
    auto rows = [&](const Matrix<double>& m) {
      std::vector<std::string> out;
      for (std::size_t p = 0; p < n; ++p) {
        std::string s = "0";
        for (std::size_t i = 0; i < n; ++i)
          s += (m(p, i) < 0 ? " - " : " + ") + detail::format_number(std::abs(m(p, i))) + "*" + names[i];
        out.push_back(s);
      }
      return out;
    };
    return parse(rows(a), rows(a_inv), DomainBox::whole(n), DomainBox::whole(n));
  }

  /// The same chart pair with the roles of the coordinate systems swapped.
  ChartMap inverted() const { return ChartMap{inverse, forward, inverse_domain, forward_domain}; }

  /// Apply `this` first, then `next`.
  ChartMap then(const ChartMap& next) const {
    if (next.dimension() != dimension()) throw DimensionMismatchError("composed charts differ in dimension");
    ChartMap out;
    for (const auto& f : next.forward) out.forward.push_back(f.substitute(forward));
    for (const auto& g : inverse) out.inverse.push_back(g.substitute(next.inverse));
    out.forward_domain = forward_domain;
    out.inverse_domain = next.inverse_domain;
    return out;
  }
};

/// First and second derivative arrays of a chart pair at a point.
struct ChartJacobians {
  std::vector<double> xhat;        // x^(x)
  Matrix<double> forward;          // (p, i) = d_i x^p
  Matrix<double> inverse;          // (j, q) = d^_q x^j, at x^(x)
  Tensor3<double> inverse_second;  // (i, q, r) = d^_q d^_r x^i, at x^(x)
};

inline constexpr double kChartTolerance = 1e-8;

inline ChartJacobians chart_jacobians(const ChartMap& map, std::span<const double> x) {
  const std::size_t n = map.dimension();
  if (x.size() != n || map.inverse.size() != n) throw DimensionMismatchError("chart and point dimensions differ");
  map.forward_domain.require(x, "chart point");

  ChartJacobians out{{}, Matrix<double>(n), Matrix<double>(n), Tensor3<double>(n)};
  const std::vector<Jet> xv = jet_variables(x, 1);
  for (std::size_t p = 0; p < n; ++p) {
    const Jet f = map.forward[p](std::span<const Jet>(xv));
    if (!f.is_finite()) throw DomainError("chart map not finite");
    out.xhat.push_back(f.value());
    for (std::size_t i = 0; i < n; ++i) out.forward(p, i) = f.partial(MultiIndex::unit(n, i));
  }
  if (std::abs(determinant(out.forward)) < kChartTolerance)
    throw SingularChartError("chart Jacobian determinant below 1e-8");

  map.inverse_domain.require(out.xhat, "hatted chart point");
  const std::vector<Jet> hv = jet_variables(out.xhat, 2);
  for (std::size_t j = 0; j < n; ++j) {
    const Jet g = map.inverse[j](std::span<const Jet>(hv));
    if (!g.is_finite()) throw DomainError("inverse chart map not finite");
    const double back = g.value();
    if (std::abs(back - x[j]) > kChartTolerance * std::max(1.0, std::abs(x[j])))
      throw ChartMismatchError("inverse chart does not return to the original point");
    for (std::size_t q = 0; q < n; ++q) {
      out.inverse(j, q) = g.partial(MultiIndex::unit(n, q));
      for (std::size_t r = 0; r < n; ++r) out.inverse_second(j, q, r) = g.partial(MultiIndex::of_partial(n, {q, r}));
    }
  }

  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += out.forward(p, i) * out.inverse(i, q);
      if (std::abs(s - (p == q ? 1.0 : 0.0)) > kChartTolerance)
        throw ChartMismatchError("chart Jacobians are not mutually inverse");
    }
  return out;
}

}  // namespace finsym
