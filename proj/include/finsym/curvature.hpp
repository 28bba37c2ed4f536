#pragma once

/// Curvature of the induced connection Gamma(x) = Chern(x, W(x)).
///
/// With the convention R(d_j, d_k) d_i = R^l_ijk d_l,
///   R^l_ijk = D_j G^l_ki - D_k G^l_ij + G^m_ki G^l_jm - G^m_ij G^l_km
/// where D_j = d/dx^j + (d W^p / dx^j) d/dy^p acts on the Chern coefficients
/// G(x, y) before y is set to W(x). Lowering uses the first slot:
/// R_ijkl = omega_in R^n_jkl.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "finsym/errors.hpp"
#include "finsym/fd_oracle.hpp"
#include "finsym/fedosov.hpp"
#include "finsym/fields.hpp"
#include "finsym/finsler.hpp"
#include "finsym/symplectic.hpp"
#include "finsym/tensor.hpp"

namespace finsym {

/// Chern coefficients at (x, W(x)) together with their base and fiber
/// partials and the first derivatives of W.
struct InducedConnectionJet {
  Tensor3<double> gamma;  // (l, k, i)
  Tensor4<double> base;   // (j, l, k, i) = d/dx^j G^l_ki
  Tensor4<double> fiber;  // (p, l, k, i) = d/dy^p G^l_ki
  Matrix<double> dW;      // (p, j) = d_j W^p

  std::size_t dimension() const noexcept { return gamma.dim(); }

  /// D_j G^l_ki including the chain term through W.
  double total(std::size_t j, std::size_t l, std::size_t k, std::size_t i) const {
    double s = base(j, l, k, i);
    for (std::size_t p = 0; p < dimension(); ++p) s += fiber(p, l, k, i) * dW(p, j);
    return s;
  }
};

inline InducedConnectionJet induced_connection_jet(const FedosovScenario& s, std::span<const double> x) {
  const std::size_t n = s.metric.dimension();
  if (x.size() != n) throw DimensionMismatchError("point and metric dimensions differ");
  const std::vector<Jet> w = eval_vector_field(s.field, x, 1);
  std::vector<double> wx;
  for (const Jet& c : w) wx.push_back(c.value());
  const Tensor3<Jet> g = chern_jets(s.metric, x, wx);

  InducedConnectionJet out{Tensor3<double>(n), Tensor4<double>(n), Tensor4<double>(n), Matrix<double>(n)};
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t j = 0; j < n; ++j) out.dW(p, j) = w[p].partial(MultiIndex::unit(n, j));
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i) {
        const Jet& e = g(l, k, i);
        out.gamma(l, k, i) = e.value();
        for (std::size_t j = 0; j < n; ++j) {
          out.base(j, l, k, i) = e.partial(MultiIndex::unit(2 * n, j));
          out.fiber(j, l, k, i) = e.partial(MultiIndex::unit(2 * n, n + j));
        }
      }
  return out;
}

struct CurvatureAtPoint {
  Tensor4<double> up;                     // (l, i, j, k) = R^l_ijk
  std::optional<Tensor4<double>> lowered; // (i, j, k, l) = R_ijkl
  double scale = 1.0;                     // max(1, largest derivative or product term)

  std::size_t dimension() const noexcept { return up.dim(); }
};

/// Assembles R^l_ijk from connection values and total derivatives
/// dgamma(j, l, k, i) = D_j G^l_ki. Only j < k is computed; the rest follows
/// from antisymmetry in the last pair.
inline CurvatureAtPoint assemble_curvature(const Tensor3<double>& gamma, const Tensor4<double>& dgamma) {
  const std::size_t n = gamma.dim();
  CurvatureAtPoint c{Tensor4<double>(n, 0.0), std::nullopt, 1.0};
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = j + 1; k < n; ++k) {
          const double a = dgamma(j, l, k, i);
          const double b = dgamma(k, l, i, j);
          double q1 = 0.0, q2 = 0.0;
          for (std::size_t m = 0; m < n; ++m) {
            q1 += gamma(m, k, i) * gamma(l, j, m);
            q2 += gamma(m, i, j) * gamma(l, k, m);
          }
          const double r = a - b + q1 - q2;
          c.up(l, i, j, k) = r;
          c.up(l, i, k, j) = -r;
          c.scale = std::max({c.scale, std::abs(a), std::abs(b), std::abs(q1), std::abs(q2)});
        }
  return c;
}

inline CurvatureAtPoint curvature_induced(const FedosovScenario& s, std::span<const double> x) {
  const InducedConnectionJet j = induced_connection_jet(s, x);
  const std::size_t n = j.dimension();
  Tensor4<double> d(n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t l = 0; l < n; ++l)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i) d(a, l, k, i) = j.total(a, l, k, i);
  return assemble_curvature(j.gamma, d);
}

/// R_ijkl = omega_in R^n_jkl.
inline Tensor4<double> lower_curvature(const Tensor4<double>& up, const Matrix<double>& w) {
  const std::size_t n = up.dim();
  if (w.dim() != n) throw DimensionMismatchError("curvature and two-form dimensions differ");
  Tensor4<double> low(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
          double s = 0.0;
          for (std::size_t m = 0; m < n; ++m) s += w(i, m) * up(m, j, k, l);
          low(i, j, k, l) = s;
        }
  return low;
}

inline Tensor4<double> lower_curvature(const CurvatureAtPoint& c, const TwoFormField& w, std::span<const double> x) {
  if (w.dimension() != c.dimension()) throw DimensionMismatchError("curvature and two-form dimensions differ");
  return lower_curvature(c.up, w.values(x));
}

/// Curvature from central differences of x -> induce_connection(s, x),
/// assembled into the same commutator formula.
inline CurvatureAtPoint curvature_by_finite_differences(const FedosovScenario& s, std::span<const double> x,
                                                        double step = 0.0) {
  const std::size_t n = s.metric.dimension();
  auto field = [&s](std::span<const double> p) {
    const ConnectionCoefficients c = induce_connection(s, p);
    return std::vector<double>(c.gamma.flat().begin(), c.gamma.flat().end());
  };
  const std::vector<std::vector<double>> jac = fd_jacobian(field, x, step);
  const Tensor3<double> gamma = induce_connection(s, x).gamma;
  Tensor4<double> d(n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t pos = 0; pos < gamma.size(); ++pos) {
      const auto [l, k, i] = gamma.unflatten(pos);
      d(j, l, k, i) = jac[j][pos];
    }
  return assemble_curvature(gamma, d);
}

/// max |R^l_ijk + R^l_jki + R^l_kij|.
inline double first_bianchi_residual(const Tensor4<double>& up) {
  const std::size_t n = up.dim();
  double r = 0.0;
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
          r = std::max(r, std::abs(up(l, i, j, k) + up(l, j, k, i) + up(l, k, i, j)));
  return r;
}

namespace detail {

/// One brace of the contracted conditions, written term by term:
///   D_b G^n_ca + D_p G^n_ca d_b W^p - D_c G^n_ab - D_p G^n_ab d_c W^p
///     + G^p_ca G^n_bp - G^p_ab G^n_cp
inline double printed_brace(const InducedConnectionJet& j, std::size_t nn, std::size_t a, std::size_t b,
                            std::size_t c) {
  const std::size_t dim = j.dimension();
  double s = j.base(b, nn, c, a) - j.base(c, nn, a, b);
  for (std::size_t p = 0; p < dim; ++p) {
    s += j.fiber(p, nn, c, a) * j.dW(p, b);
    s -= j.fiber(p, nn, a, b) * j.dW(p, c);
    s += j.gamma(p, c, a) * j.gamma(nn, b, p);
    s -= j.gamma(p, a, b) * j.gamma(nn, c, p);
  }
  return s;
}

}  // namespace detail

struct BianchiResidual {
  double direct = 0.0;        // contracted cyclic condition from the brace formula
  double assembled = 0.0;     // omega_in (R^n_jkl + R^n_klj + R^n_ljk) from curvature_induced
  double two_path = 0.0;      // max entrywise |direct - assembled|
  double uncontracted = 0.0;  // first Bianchi on R^l_ijk
  double scale = 1.0;
};

inline BianchiResidual bianchi_contracted_residual(const FedosovScenario& s, std::span<const double> x) {
  const TwoFormField& form = s.two_form();
  const InducedConnectionJet j = induced_connection_jet(s, x);
  const CurvatureAtPoint c = curvature_induced(s, x);
  const Matrix<double> w = form.values(x);
  const std::size_t n = j.dimension();
  BianchiResidual r;
  r.scale = c.scale;
  r.uncontracted = first_bianchi_residual(c.up);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t jj = 0; jj < n; ++jj)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
          double direct = 0.0, assembled = 0.0;
          for (std::size_t m = 0; m < n; ++m) {
            const double braces = detail::printed_brace(j, m, jj, k, l) + detail::printed_brace(j, m, k, l, jj) +
                                  detail::printed_brace(j, m, l, jj, k);
            direct += w(i, m) * braces;
            assembled += w(i, m) * (c.up(m, jj, k, l) + c.up(m, k, l, jj) + c.up(m, l, jj, k));
          }
          r.direct = std::max(r.direct, std::abs(direct));
          r.assembled = std::max(r.assembled, std::abs(assembled));
          r.two_path = std::max(r.two_path, std::abs(direct - assembled));
        }
  return r;
}

struct PairSymmetryResidual {
  double lowered = 0.0;   // max |R_ijkl - R_jikl| from lower_curvature
  double literal = 0.0;   // max of the brace form {..}_jkl omega_in - {..}_ikl omega_jn
  double two_path = 0.0;  // max entrywise |lowered - literal|
  double scale = 1.0;
};

inline PairSymmetryResidual pair_symmetry_residual(const FedosovScenario& s, std::span<const double> x) {
  const TwoFormField& form = s.two_form();
  const InducedConnectionJet j = induced_connection_jet(s, x);
  const CurvatureAtPoint c = curvature_induced(s, x);
  const Matrix<double> w = form.values(x);
  const Tensor4<double> low = lower_curvature(c.up, w);
  const std::size_t n = j.dimension();
  PairSymmetryResidual r;
  r.scale = std::max(c.scale, max_abs(low));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t jj = 0; jj < n; ++jj)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
          const double lowered = low(i, jj, k, l) - low(jj, i, k, l);
          double literal = 0.0;
          for (std::size_t m = 0; m < n; ++m)
            literal += detail::printed_brace(j, m, jj, k, l) * w(i, m) - detail::printed_brace(j, m, i, k, l) * w(jj, m);
          r.lowered = std::max(r.lowered, std::abs(lowered));
          r.literal = std::max(r.literal, std::abs(literal));
          r.two_path = std::max(r.two_path, std::abs(lowered - literal));
        }
  return r;
}

}  // namespace finsym
