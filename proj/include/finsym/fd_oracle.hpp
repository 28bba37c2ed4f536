#pragma once

/// Central finite differences with one Richardson extrapolation step.
///
/// The stencil is the tensor product of one-dimensional central stencils, one
/// per differentiated variable; each has O(h^2) error, and combining step h
/// with step h/2 as (4 D(h/2) - D(h)) / 3 cancels the h^2 term, leaving
/// O(h^4). This is independent of the jet kernel and is used to validate it.

#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "finsym/errors.hpp"
#include "finsym/domain.hpp"
#include "finsym/jet.hpp"

namespace finsym {

template <class F>
concept RealField = std::invocable<const F&, std::span<const double>> &&
                    std::convertible_to<std::invoke_result_t<const F&, std::span<const double>>, double>;

/// Default base step for a derivative of total degree `degree`, before the
/// per-coordinate scaling by max(1, |x_v|).
inline double fd_default_step(int degree) {
  return std::pow(std::numeric_limits<double>::epsilon(), 1.0 / (degree + 4));
}

namespace detail {

// Weighted stencil of the one-dimensional central difference of order k with
// unit step: offsets are (k/2 - j), weights (-1)^j C(k, j).
struct Stencil1D {
  std::vector<double> offsets;
  std::vector<double> weights;
};

inline Stencil1D central_stencil(int k) {
  Stencil1D s;
  double binom = 1.0;
  for (int j = 0; j <= k; ++j) {
    s.offsets.push_back(0.5 * k - j);
    s.weights.push_back((j % 2 == 0 ? 1.0 : -1.0) * binom);
    binom = binom * (k - j) / (j + 1);
  }
  return s;
}

template <class Eval>
double central_difference(const Eval& eval, std::span<const double> point, const MultiIndex& idx,
                          std::span<const double> steps) {
  const std::size_t n = point.size();
  std::vector<std::size_t> vars;
  std::vector<Stencil1D> stencils;
  for (std::size_t v = 0; v < n; ++v)
    if (idx[v] > 0) {
      vars.push_back(v);
      stencils.push_back(central_stencil(idx[v]));
    }
  if (vars.empty()) return eval(point);

  std::vector<std::size_t> pos(vars.size(), 0);
  std::vector<double> x(point.begin(), point.end());
  double sum = 0.0;
  while (true) {
    double w = 1.0;
    for (std::size_t a = 0; a < vars.size(); ++a) {
      const std::size_t v = vars[a];
      x[v] = point[v] + stencils[a].offsets[pos[a]] * steps[v];
      w *= stencils[a].weights[pos[a]];
    }
    sum += w * eval(std::span<const double>(x));
    std::size_t a = 0;
    for (; a < vars.size(); ++a) {
      if (++pos[a] < stencils[a].offsets.size()) break;
      pos[a] = 0;
    }
    if (a == vars.size()) break;
  }
  for (std::size_t v : vars) sum /= std::pow(steps[v], idx[v]);
  return sum;
}

}  // namespace detail

/// Estimate of the partial derivative `idx` of `field` at `point`.
/// `base_step` <= 0 selects fd_default_step(idx.degree()). When `domain` is
/// given, a stencil reaching outside it raises DomainError.
template <RealField F>
double fd_oracle(const F& field, std::span<const double> point, const MultiIndex& idx, double base_step = 0.0,
                 const DomainBox* domain = nullptr) {
  if (idx.num_vars() != point.size()) throw DimensionMismatchError("multi-index and point dimensions differ");
  if (base_step <= 0.0) base_step = fd_default_step(idx.degree());
  std::vector<double> steps(point.size());
  for (std::size_t v = 0; v < point.size(); ++v) steps[v] = base_step * std::max(1.0, std::abs(point[v]));

  if (domain) {
    // The widest stencil reaches (k/2) h along each differentiated axis.
    std::vector<double> lo(point.begin(), point.end()), hi(point.begin(), point.end());
    for (std::size_t v = 0; v < point.size(); ++v) {
      const double reach = 0.5 * idx[v] * steps[v];
      lo[v] -= reach;
      hi[v] += reach;
    }
    if (!domain->contains_box(lo, hi)) throw DomainError("finite-difference stencil leaves the domain");
  }

  auto eval = [&](std::span<const double> x) { return static_cast<double>(std::invoke(field, x)); };
  const double coarse = detail::central_difference(eval, point, idx, steps);
  if (idx.degree() == 0) return coarse;
  for (double& h : steps) h *= 0.5;
  const double fine = detail::central_difference(eval, point, idx, steps);
  return (4.0 * fine - coarse) / 3.0;
}

/// First derivatives of a vector-valued map by the same Richardson scheme;
/// result[v][c] = d out_c / d x_v.
template <class F>
std::vector<std::vector<double>> fd_jacobian(const F& field, std::span<const double> point, double base_step = 0.0) {
  if (base_step <= 0.0) base_step = fd_default_step(1);
  std::vector<std::vector<double>> out(point.size());
  std::vector<double> x(point.begin(), point.end());
  for (std::size_t v = 0; v < point.size(); ++v) {
    const double h = base_step * std::max(1.0, std::abs(point[v]));
    auto diff = [&](double step) {
      x[v] = point[v] + 0.5 * step;
      std::vector<double> plus = field(std::span<const double>(x));
      x[v] = point[v] - 0.5 * step;
      std::vector<double> minus = field(std::span<const double>(x));
      x[v] = point[v];
      for (std::size_t c = 0; c < plus.size(); ++c) plus[c] = (plus[c] - minus[c]) / step;
      return plus;
    };
    const std::vector<double> coarse = diff(h);
    const std::vector<double> fine = diff(0.5 * h);
    out[v].resize(coarse.size());
    for (std::size_t c = 0; c < coarse.size(); ++c) out[v][c] = (4.0 * fine[c] - coarse[c]) / 3.0;
  }
  return out;
}

}  // namespace finsym
