#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "finsym/errors.hpp"

namespace finsym {

/// Dense array of rank `Rank` with every extent equal to `dim`, row-major.
/// Index conventions used throughout the library:
///   Matrix    (i,j)      g_ij, omega_ij, N^i_j, Jacobians (row = upper index)
///   Tensor3   (i,j,k)    Gamma^i_jk, A_ijk, dg_ij/dx^k
///   Tensor4   (l,i,j,k)  R^l_ijk
template <class T, std::size_t Rank>
class CubeTensor {
 public:
  CubeTensor() = default;

  explicit CubeTensor(std::size_t dim, const T& fill = T{})
      : dim_(dim), data_(ipow(dim, Rank), fill) {}

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return data_.size(); }

  template <class... I>
    requires(sizeof...(I) == Rank)
  T& operator()(I... idx) {
    return data_[offset({static_cast<std::size_t>(idx)...})];
  }

  template <class... I>
    requires(sizeof...(I) == Rank)
  const T& operator()(I... idx) const {
    return data_[offset({static_cast<std::size_t>(idx)...})];
  }

  std::span<T> flat() noexcept { return data_; }
  std::span<const T> flat() const noexcept { return data_; }

  /// Multi-index of flat position `pos`.
  std::array<std::size_t, Rank> unflatten(std::size_t pos) const {
    std::array<std::size_t, Rank> idx{};
    for (std::size_t r = Rank; r-- > 0;) {
      idx[r] = pos % dim_;
      pos /= dim_;
    }
    return idx;
  }

  template <class F>
  auto map(F&& f) const -> CubeTensor<decltype(f(std::declval<const T&>())), Rank> {
    CubeTensor<decltype(f(std::declval<const T&>())), Rank> out(dim_);
    for (std::size_t k = 0; k < data_.size(); ++k) out.flat()[k] = f(data_[k]);
    return out;
  }

 private:
  static constexpr std::size_t ipow(std::size_t b, std::size_t e) {
    std::size_t r = 1;
    for (std::size_t k = 0; k < e; ++k) r *= b;
    return r;
  }

  std::size_t offset(std::array<std::size_t, Rank> idx) const {
    std::size_t off = 0;
    for (std::size_t r = 0; r < Rank; ++r) {
      assert(idx[r] < dim_);
      off = off * dim_ + idx[r];
    }
    return off;
  }

  std::size_t dim_ = 0;
  std::vector<T> data_;
};

template <class T>
using Matrix = CubeTensor<T, 2>;
template <class T>
using Tensor3 = CubeTensor<T, 3>;
template <class T>
using Tensor4 = CubeTensor<T, 4>;

template <std::size_t Rank>
double max_abs(const CubeTensor<double, Rank>& t) {
  double m = 0.0;
  for (double v : t.flat()) m = std::max(m, std::abs(v));
  return m;
}

template <std::size_t Rank>
double max_abs_diff(const CubeTensor<double, Rank>& a, const CubeTensor<double, Rank>& b) {
  if (a.dim() != b.dim()) throw DimensionMismatchError("tensor dimensions differ");
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a.flat()[k] - b.flat()[k]));
  return m;
}

inline Matrix<double> identity_matrix(std::size_t n) {
  Matrix<double> m(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

inline double value_of(double v) { return v; }

/// Inverse by Gauss-Jordan elimination with partial pivoting. Works for any
/// scalar with field arithmetic and a `value_of` overload (doubles, jets).
template <class T>
Matrix<T> inverse(const Matrix<T>& a) {
  const std::size_t n = a.dim();
  Matrix<T> work = a;
  Matrix<T> inv(n);
  // a(0,0) * 0 carries the scalar's shape (jet space) into the identity.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = a(0, 0) * 0.0 + (i == j ? 1.0 : 0.0);

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(value_of(work(r, col))) > std::abs(value_of(work(pivot, col)))) pivot = r;
    if (value_of(work(pivot, col)) == 0.0) throw DomainError("singular matrix");
    if (pivot != col)
      for (std::size_t c = 0; c < n; ++c) {
        std::swap(work(pivot, c), work(col, c));
        std::swap(inv(pivot, c), inv(col, c));
      }
    const T p = work(col, col);
    for (std::size_t c = 0; c < n; ++c) {
      work(col, c) = work(col, c) / p;
      inv(col, c) = inv(col, c) / p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const T f = work(r, col);
      for (std::size_t c = 0; c < n; ++c) {
        work(r, c) = work(r, c) - f * work(col, c);
        inv(r, c) = inv(r, c) - f * inv(col, c);
      }
    }
  }
  return inv;
}

/// Determinant of the leading k-by-k block, by LU with partial pivoting.
inline double leading_determinant(const Matrix<double>& a, std::size_t k) {
  std::vector<double> m(k * k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) m[i * k + j] = a(i, j);
  double det = 1.0;
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < k; ++r)
      if (std::abs(m[r * k + col]) > std::abs(m[pivot * k + col])) pivot = r;
    if (m[pivot * k + col] == 0.0) return 0.0;
    if (pivot != col) {
      for (std::size_t c = 0; c < k; ++c) std::swap(m[pivot * k + c], m[col * k + c]);
      det = -det;
    }
    det *= m[col * k + col];
    for (std::size_t r = col + 1; r < k; ++r) {
      const double f = m[r * k + col] / m[col * k + col];
      for (std::size_t c = col; c < k; ++c) m[r * k + c] -= f * m[col * k + c];
    }
  }
  return det;
}

inline double determinant(const Matrix<double>& a) { return leading_determinant(a, a.dim()); }

/// Leading principal minors, smallest block first.
inline std::vector<double> leading_minors(const Matrix<double>& a) {
  std::vector<double> minors;
  for (std::size_t k = 1; k <= a.dim(); ++k) minors.push_back(leading_determinant(a, k));
  return minors;
}

}  // namespace finsym
