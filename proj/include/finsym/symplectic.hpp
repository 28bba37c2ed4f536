#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "finsym/domain.hpp"
#include "finsym/errors.hpp"
#include "finsym/expression.hpp"
#include "finsym/finsler.hpp"
#include "finsym/jet.hpp"
#include "finsym/tensor.hpp"

namespace finsym {

inline constexpr double kDefaultNondegeneracyTolerance = 1e-8;

/// A two-form field omega_ij(x). Only entries with i < j are stored; the
/// lower triangle is their negative and the diagonal is zero.
///
/// The same components serve as the canonical lift of omega to the
/// pulled-back bundle over TM \ 0: the lift is constant along fibers, so it is
/// evaluated at the base point and y never enters.
class TwoFormField {
 public:
  enum class Source { standard, explicit_entries, exterior_derivative };

  /// sum_i dx^i ^ dx^(n+i) on a 2n-dimensional chart.
  static TwoFormField standard(std::size_t half_dim) {
    if (half_dim == 0) throw OddDimensionError("standard form needs n >= 1");
    TwoFormField w(Source::standard, 2 * half_dim);
    const auto names = coordinate_names(2 * half_dim);
    for (std::size_t i = 0; i < half_dim; ++i) w.entries_.emplace(std::pair{i, half_dim + i}, ScalarField::constant(1.0, names));
    return w;
  }

  /// Entries keyed by 0-based (i, j), i < j. Missing entries are zero.
  static TwoFormField from_entries(std::size_t dim, std::map<std::pair<std::size_t, std::size_t>, ScalarField> upper) {
    TwoFormField w(Source::explicit_entries, dim);
    for (auto& [ij, f] : upper) {
      if (ij.first >= ij.second || ij.second >= dim)
        throw DimensionMismatchError("two-form entries must satisfy i < j < dimension");
      w.entries_.emplace(ij, std::move(f));
    }
    return w;
  }

  /// d(b_i dx^i): omega_pq = d_p b_q - d_q b_p, differentiated at evaluation.
  static TwoFormField exterior_derivative(std::vector<ScalarField> b) {
    TwoFormField w(Source::exterior_derivative, b.size());
    w.covector_ = std::move(b);
    return w;
  }

  std::size_t dimension() const noexcept { return dim_; }
  Source source() const noexcept { return source_; }
  bool is_standard() const noexcept { return source_ == Source::standard; }
  const std::vector<ScalarField>& covector() const noexcept { return covector_; }

  void set_domain(DomainBox d) { domain_ = std::move(d); }

  /// Component jets over the chart coordinates, order <= 3.
  Matrix<Jet> jets(std::span<const double> x, int order) const {
    check_point(x);
    const std::vector<Jet> xv = jet_variables(x, source_ == Source::exterior_derivative ? order + 1 : order);
    const std::span<const Jet> args(xv);
    const Jet zero = (source_ == Source::exterior_derivative ? xv[0].truncated(order) : xv[0]) * 0.0;
    Matrix<Jet> w(dim_, zero);
    if (source_ == Source::exterior_derivative) {
      std::vector<Jet> b;
      for (const auto& f : covector_) b.push_back(f(args));
      for (std::size_t p = 0; p < dim_; ++p)
        for (std::size_t q = p + 1; q < dim_; ++q) {
          w(p, q) = b[q].derivative(p) - b[p].derivative(q);
          w(q, p) = -w(p, q);
        }
    } else {
      for (const auto& [ij, f] : entries_) {
        w(ij.first, ij.second) = f(args);
        w(ij.second, ij.first) = -w(ij.first, ij.second);
      }
    }
    for (const Jet& e : w.flat())
      if (!e.is_finite()) throw DomainError("two-form not finite at evaluation point");
    return w;
  }

  Matrix<double> values(std::span<const double> x) const {
    return jets(x, 0).map([](const Jet& j) { return j.value(); });
  }

  /// omega_ij(x) and (k, i, j) = d_k omega_ij(x).
  std::pair<Matrix<double>, Tensor3<double>> values_and_derivatives(std::span<const double> x) const {
    const Matrix<Jet> w = jets(x, 1);
    Matrix<double> v(dim_);
    Tensor3<double> d(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) {
        v(i, j) = w(i, j).value();
        for (std::size_t k = 0; k < dim_; ++k) d(k, i, j) = w(i, j).partial(MultiIndex::unit(dim_, k));
      }
    return {v, d};
  }

 private:
  TwoFormField(Source s, std::size_t dim) : source_(s), dim_(dim) {
    if (dim == 0) throw DimensionMismatchError("two-form dimension must be positive");
  }

  void check_point(std::span<const double> x) const {
    if (x.size() != dim_) throw DimensionMismatchError("two-form and point dimensions differ");
    if (domain_) domain_->require(x, "two-form point");
  }

  Source source_;
  std::size_t dim_;
  std::map<std::pair<std::size_t, std::size_t>, ScalarField> entries_;
  std::vector<ScalarField> covector_;
  std::optional<DomainBox> domain_;
};

inline TwoFormField standard_form(std::size_t half_dim) { return TwoFormField::standard(half_dim); }

inline TwoFormField randers_two_form(std::vector<ScalarField> b) {
  return TwoFormField::exterior_derivative(std::move(b));
}

/// max over i < j < k of |d_i w_jk + d_j w_ki + d_k w_ij|; zero below dimension 3.
inline double closedness_residual(const TwoFormField& w, std::span<const double> x) {
  const auto [v, d] = w.values_and_derivatives(x);
  const std::size_t n = w.dimension();
  double r = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) r = std::max(r, std::abs(d(i, j, k) + d(j, k, i) + d(k, i, j)));
  return r;
}

/// |det omega(x)|; omega is nondegenerate at x when this is >= tol_nd.
inline double nondegeneracy_check(const TwoFormField& w, std::span<const double> x) {
  if (w.dimension() % 2 != 0) throw OddDimensionError("two-form on an odd-dimensional chart is degenerate");
  return std::abs(determinant(w.values(x)));
}

/// Residual of d_k omega_ij = omega_il C^l_kj - omega_jl C^l_ki with entry
/// (k, i, j) = d_k omega_ij - omega_il C^l_kj + omega_jl C^l_ki, for any
/// connection coefficients C (l, k, j) = C^l_kj.
inline Tensor3<double> preservation_tensor(const Matrix<double>& w, const Tensor3<double>& dw,
                                           const Tensor3<double>& conn) {
  const std::size_t n = w.dim();
  if (dw.dim() != n || conn.dim() != n) throw DimensionMismatchError("form and connection dimensions differ");
  Tensor3<double> r(n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double s = dw(k, i, j);
        for (std::size_t l = 0; l < n; ++l) s += -w(i, l) * conn(l, k, j) + w(j, l) * conn(l, k, i);
        r(k, i, j) = s;
      }
  return r;
}

struct PreservationResidual {
  Tensor3<double> entries;  // (k, i, j)
  double max_abs = 0.0;
};

/// Whether the Chern connection at (x, y) preserves the canonical lift of omega.
inline PreservationResidual chern_preservation_residual(const MetricSpec& m, const TwoFormField& w,
                                                        std::span<const double> x, std::span<const double> y) {
  if (m.dimension() != w.dimension()) throw DimensionMismatchError("metric and two-form dimensions differ");
  const Tensor3<double> chern = chern_coefficients(m, x, y);
  const auto [v, d] = w.values_and_derivatives(x);
  PreservationResidual r{preservation_tensor(v, d, chern), 0.0};
  r.max_abs = max_abs(r.entries);
  return r;
}

struct RandersCondition {
  Tensor3<double> general;  // (k, i, j), including the second-derivative bracket
  Tensor3<double> darboux;  // second-derivative bracket dropped
  double general_max = 0.0;
  double darboux_max = 0.0;
  bool second_derivatives_vanish = false;  // d_k d_j b_i == 0 at x
};

/// The preservation condition for omega = d(beta) written through b:
///   (C^l_ki d_l b_j - C^l_kj d_l b_i) + (C^l_kj d_i b_l - C^l_ki d_j b_l)
///     + (d_k d_j b_i - d_k d_i b_j)
/// with C the Chern coefficients at (x, y).
inline RandersCondition randers_preservation_condition(const MetricSpec& m, std::span<const double> x,
                                                       std::span<const double> y) {
  if (m.family() != MetricFamily::randers) throw NotRandersError("metric is not of Randers type");
  const std::size_t n = m.dimension();
  const Tensor3<double> c = chern_coefficients(m, x, y);
  const std::vector<Jet> xv = jet_variables(x, 2);
  Matrix<double> db(n);       // (l, j) = d_l b_j
  Tensor3<double> ddb(n);     // (k, j, i) = d_k d_j b_i
  double dd_max = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const Jet bj = m.covector()[j](std::span<const Jet>(xv));
    for (std::size_t l = 0; l < n; ++l) {
      db(l, j) = bj.partial(MultiIndex::unit(n, l));
      for (std::size_t k = 0; k < n; ++k) {
        ddb(k, l, j) = bj.partial(MultiIndex::of_partial(n, {k, l}));
        dd_max = std::max(dd_max, std::abs(ddb(k, l, j)));
      }
    }
  }

  RandersCondition out{Tensor3<double>(n), Tensor3<double>(n), 0.0, 0.0, dd_max == 0.0};
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double first = 0.0, second = 0.0;
        for (std::size_t l = 0; l < n; ++l) {
          first += c(l, k, i) * db(l, j) - c(l, k, j) * db(l, i);
          second += c(l, k, j) * db(i, l) - c(l, k, i) * db(j, l);
        }
        const double third = ddb(k, j, i) - ddb(k, i, j);
        out.darboux(k, i, j) = first + second;
        out.general(k, i, j) = first + second + third;
      }
  out.general_max = max_abs(out.general);
  out.darboux_max = max_abs(out.darboux);
  return out;
}

}  // namespace finsym
