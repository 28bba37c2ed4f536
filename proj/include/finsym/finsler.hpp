#pragma once

/// Finsler fundamental quantities and the Chern connection at a point (x, y).
///
/// Everything is derived from one jet of L = F^2 / 2 over the 2n phase
/// coordinates (x^1..x^n, y^1..y^n):
///
///   g_ij      = L_{y^i y^j}
///   A_ijk     = (F / 2) d g_ij / d y^k
///   gamma^i_jk = (1/2) g^is (d_k g_sj + d_j g_sk - d_s g_jk)
///   N^i_j     = gamma^i_jk y^k - (1/F) A^i_jk gamma^k_rs y^r y^s
///   Chern^l_jk = gamma^l_jk - (g^li / F)(A_ijs N^s_k - A_jks N^s_i + A_kis N^s_j)
///
/// The closed form is checked against the torsion-free and almost
/// g-compatible structure equations by chern_structural_residuals.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "finsym/check_record.hpp"
#include "finsym/domain.hpp"
#include "finsym/errors.hpp"
#include "finsym/expression.hpp"
#include "finsym/jet.hpp"
#include "finsym/tensor.hpp"

namespace finsym {

inline constexpr double kDefaultMinFiberNorm = 1e-6;

enum class MetricFamily { riemannian, randers, custom };

inline const char* to_string(MetricFamily f) {
  switch (f) {
    case MetricFamily::riemannian:
      return "riemannian";
    case MetricFamily::randers:
      return "randers";
    case MetricFamily::custom:
      return "custom";
  }
  return "?";
}

/// Declarative Finsler metric on one chart.
///   riemannian: F = sqrt(g_ij(x) y^i y^j)
///   randers:    F = sqrt(a_ij(x) y^i y^j) + b_i(x) y^i
///   custom:     F(x, y) given directly
class MetricSpec {
 public:
  static MetricSpec riemannian(Matrix<ScalarField> g, DomainBox domain, double y_min = kDefaultMinFiberNorm) {
    check_symmetric(g);
    MetricSpec m(MetricFamily::riemannian, g.dim(), std::move(domain), y_min);
    m.matrix_ = std::move(g);
    return m;
  }

  static MetricSpec randers(Matrix<ScalarField> alpha, std::vector<ScalarField> b, DomainBox domain,
                            double y_min = kDefaultMinFiberNorm) {
    check_symmetric(alpha);
    if (b.size() != alpha.dim()) throw InvalidMetricError("Randers one-form and metric dimensions differ");
    MetricSpec m(MetricFamily::randers, alpha.dim(), std::move(domain), y_min);
    m.matrix_ = std::move(alpha);
    m.covector_ = std::move(b);
    return m;
  }

  static MetricSpec custom(ScalarField f, std::size_t n, DomainBox domain, double y_min = kDefaultMinFiberNorm) {
    MetricSpec m(MetricFamily::custom, n, std::move(domain), y_min);
    m.function_ = std::move(f);
    return m;
  }

  static MetricSpec parse_riemannian(const std::vector<std::vector<std::string>>& g, DomainBox domain,
                                     double y_min = kDefaultMinFiberNorm) {
    return riemannian(parse_matrix(g), std::move(domain), y_min);
  }

  static MetricSpec parse_randers(const std::vector<std::vector<std::string>>& alpha,
                                  const std::vector<std::string>& b, DomainBox domain,
                                  double y_min = kDefaultMinFiberNorm) {
    std::vector<ScalarField> bs;
    for (const auto& t : b) bs.push_back(parse_field(t, coordinate_names(b.size())));
    return randers(parse_matrix(alpha), std::move(bs), std::move(domain), y_min);
  }

  static MetricSpec parse_custom(const std::string& f, std::size_t n, DomainBox domain,
                                 double y_min = kDefaultMinFiberNorm) {
    return custom(parse_field(f, coordinate_names(n, true)), n, std::move(domain), y_min);
  }

  MetricFamily family() const noexcept { return family_; }
  std::size_t dimension() const noexcept { return n_; }
  const DomainBox& domain() const noexcept { return domain_; }
  double y_min() const noexcept { return y_min_; }
  /// g_ij for riemannian, a_ij for randers.
  const Matrix<ScalarField>& matrix() const noexcept { return matrix_; }
  /// b_i for randers.
  const std::vector<ScalarField>& covector() const noexcept { return covector_; }
  const ScalarField& function() const noexcept { return function_; }

  void require_phase_point(std::span<const double> x, std::span<const double> y) const {
    if (x.size() != n_ || y.size() != n_) throw DimensionMismatchError("metric and point dimensions differ");
    domain_.require(x, "base point");
    double n2 = 0.0;
    for (double v : y) n2 += v * v;
    if (!(std::sqrt(n2) >= y_min_)) throw DomainError("fiber vector inside the excluded zero section");
  }

  /// F over phase coordinates xy = (x, y); T is double or Jet.
  template <class T>
  T finsler_function(std::span<const T> xy) const {
    switch (family_) {
      case MetricFamily::riemannian:
        return sqrt_of(quadratic(xy));
      case MetricFamily::randers: {
        T beta = covector_[0].eval(xy) * xy[n_];
        for (std::size_t i = 1; i < n_; ++i) beta = beta + covector_[i].eval(xy) * xy[n_ + i];
        return sqrt_of(quadratic(xy)) + beta;
      }
      case MetricFamily::custom:
        return function_.eval(xy);
    }
    throw InvalidMetricError("unknown metric family");
  }

  /// L = F^2 / 2; polynomial in y for the Riemannian family.
  template <class T>
  T half_energy(std::span<const T> xy) const {
    if (family_ == MetricFamily::riemannian) return quadratic(xy) * 0.5;
    const T f = finsler_function(xy);
    if (!(value_of(f) > 0.0)) throw NonPositiveError("Finsler function is not positive");
    return f * f * 0.5;
  }

 private:
  MetricSpec(MetricFamily family, std::size_t n, DomainBox domain, double y_min)
      : family_(family), n_(n), domain_(std::move(domain)), y_min_(y_min) {
    if (n == 0) throw InvalidMetricError("metric dimension must be positive");
    if (domain_.dimension() != n) throw InvalidMetricError("metric domain dimension differs from metric dimension");
  }

  static Matrix<ScalarField> parse_matrix(const std::vector<std::vector<std::string>>& rows) {
    const std::size_t n = rows.size();
    Matrix<ScalarField> m(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (rows[i].size() != n) throw InvalidMetricError("metric matrix is not square");
      for (std::size_t j = 0; j < n; ++j) m(i, j) = parse_field(rows[i][j], coordinate_names(n));
    }
    return m;
  }

  static void check_symmetric(const Matrix<ScalarField>& g) {
    for (std::size_t i = 0; i < g.dim(); ++i)
      for (std::size_t j = i + 1; j < g.dim(); ++j)
        if (!(g(i, j) == g(j, i))) throw InvalidMetricError("metric matrix is not symmetric");
  }

  static double sqrt_of(double v) {
    if (!(v > 0.0)) throw NonPositiveError("quadratic form is not positive");
    return std::sqrt(v);
  }
  static Jet sqrt_of(const Jet& v) {
    if (!(v.value() > 0.0)) throw NonPositiveError("quadratic form is not positive");
    return sqrt(v);
  }

  template <class T>
  T quadratic(std::span<const T> xy) const {
    T q = xy[0] * 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      q = q + matrix_(i, i).eval(xy) * xy[n_ + i] * xy[n_ + i];
      for (std::size_t j = i + 1; j < n_; ++j) q = q + matrix_(i, j).eval(xy) * xy[n_ + i] * xy[n_ + j] * 2.0;
    }
    return q;
  }

  MetricFamily family_;
  std::size_t n_;
  DomainBox domain_;
  double y_min_;
  Matrix<ScalarField> matrix_;
  std::vector<ScalarField> covector_;
  ScalarField function_;
};

/// All fundamental quantities at one (x, y).
struct FinslerSample {
  std::vector<double> x, y;
  double F = 0.0;
  std::vector<double> dF_dy;  // F_{y^k}
  Matrix<double> g, g_inv;
  Tensor3<double> dg_dx;  // (i, j, k) = d g_ij / d x^k
  Tensor3<double> A;
  Tensor3<double> gamma;  // (i, j, k) = gamma^i_jk
  Matrix<double> N;       // (i, j) = N^i_j
  Tensor3<double> chern;  // (l, j, k) = Chern^l_jk
};

namespace detail {

/// Phase coordinates (x, y) as jets of the given order over 2n variables.
inline std::vector<Jet> phase_jets(std::span<const double> x, std::span<const double> y, int order) {
  std::vector<double> xy(x.begin(), x.end());
  xy.insert(xy.end(), y.begin(), y.end());
  return jet_variables(xy, order);
}

template <class T>
T zero_like(const T& v) {
  return v * 0.0;
}

/// Inputs to the closed-form Chern assembly.
template <class T>
struct ChernInputs {
  T L;
  Matrix<T> g;
  Tensor3<T> dg_dx;
  Tensor3<T> dg_dy;
  std::vector<T> y;
};

template <class T>
struct ChernTerms {
  T F;
  Matrix<T> g_inv;
  Tensor3<T> A, gamma, chern;
  Matrix<T> N;
};

/// Copy `t(a, b, c)` for a <= b <= c to every permutation.
template <class T>
void mirror_totally_symmetric(Tensor3<T>& t) {
  const std::size_t n = t.dim();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a; b < n; ++b)
      for (std::size_t c = b; c < n; ++c) {
        const T v = t(a, b, c);
        t(a, c, b) = v;
        t(b, a, c) = v;
        t(b, c, a) = v;
        t(c, a, b) = v;
        t(c, b, a) = v;
      }
}

template <class T>
ChernTerms<T> assemble_chern(const ChernInputs<T>& in) {
  using std::sqrt;
  const std::size_t n = in.g.dim();
  ChernTerms<T> out;
  out.F = sqrt(in.L * 2.0);
  const T zero = zero_like(out.F);
  const T inv_F = 1.0 / out.F;
  out.g_inv = inverse(in.g);

  out.A = Tensor3<T>(n, zero);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      for (std::size_t k = j; k < n; ++k) out.A(i, j, k) = out.F * 0.5 * in.dg_dy(i, j, k);
  mirror_totally_symmetric(out.A);

  out.gamma = Tensor3<T>(n, zero);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = j; k < n; ++k) {
        T s = zero;
        for (std::size_t m = 0; m < n; ++m)
          s = s + out.g_inv(i, m) * (in.dg_dx(m, j, k) + in.dg_dx(m, k, j) - in.dg_dx(j, k, m));
        out.gamma(i, j, k) = s * 0.5;
        out.gamma(i, k, j) = out.gamma(i, j, k);
      }

  // G^k = gamma^k_rs y^r y^s and A^i_jk = g^il A_ljk.
  std::vector<T> G(n, zero);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t s = 0; s < n; ++s) G[k] = G[k] + out.gamma(k, r, s) * in.y[r] * in.y[s];
  Tensor3<T> A_up(n, zero);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) A_up(i, j, k) = A_up(i, j, k) + out.g_inv(i, l) * out.A(l, j, k);

  out.N = Matrix<T>(n, zero);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      T s = zero;
      T c = zero;
      for (std::size_t k = 0; k < n; ++k) {
        s = s + out.gamma(i, j, k) * in.y[k];
        c = c + A_up(i, j, k) * G[k];
      }
      out.N(i, j) = s - c * inv_F;
    }

  out.chern = Tensor3<T>(n, zero);
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = j; k < n; ++k) {
        T corr = zero;
        for (std::size_t i = 0; i < n; ++i) {
          T bracket = zero;
          for (std::size_t s = 0; s < n; ++s)
            bracket = bracket + out.A(i, j, s) * out.N(s, k) - out.A(j, k, s) * out.N(s, i) + out.A(k, i, s) * out.N(s, j);
          corr = corr + out.g_inv(l, i) * bracket;
        }
        out.chern(l, j, k) = out.gamma(l, j, k) - corr * inv_F;
        out.chern(l, k, j) = out.chern(l, j, k);
      }
  return out;
}

/// Chern inputs as plain values from a jet of L of order >= 3.
inline ChernInputs<double> value_inputs(const Jet& L, std::span<const double> y) {
  const std::size_t n = y.size();
  const std::size_t nv = 2 * n;
  ChernInputs<double> in{L.value(), Matrix<double>(n), Tensor3<double>(n), Tensor3<double>(n), {y.begin(), y.end()}};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      in.g(i, j) = in.g(j, i) = L.partial(MultiIndex::of_partial(nv, {n + i, n + j}));
      for (std::size_t k = 0; k < n; ++k) {
        in.dg_dx(i, j, k) = in.dg_dx(j, i, k) = L.partial(MultiIndex::of_partial(nv, {n + i, n + j, k}));
        in.dg_dy(i, j, k) = in.dg_dy(j, i, k) = L.partial(MultiIndex::of_partial(nv, {n + i, n + j, n + k}));
      }
    }
  return in;
}

/// Chern inputs as jets one order below `L.order() - 3`.
inline ChernInputs<Jet> jet_inputs(const Jet& L, std::span<const Jet> phase) {
  const std::size_t n = phase.size() / 2;
  const int k_out = L.order() - 3;
  ChernInputs<Jet> in{L.truncated(k_out), Matrix<Jet>(n), Tensor3<Jet>(n), Tensor3<Jet>(n), {}};
  for (std::size_t i = 0; i < n; ++i) in.y.push_back(phase[n + i].truncated(k_out));
  std::vector<Jet> dL(n);
  for (std::size_t i = 0; i < n; ++i) dL[i] = L.derivative(n + i);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const Jet gij = dL[i].derivative(n + j);
      in.g(i, j) = in.g(j, i) = gij.truncated(k_out);
      for (std::size_t k = 0; k < n; ++k) {
        in.dg_dx(i, j, k) = in.dg_dx(j, i, k) = gij.derivative(k).truncated(k_out);
        in.dg_dy(i, j, k) = in.dg_dy(j, i, k) = gij.derivative(n + k).truncated(k_out);
      }
    }
  // dg_dy is totally symmetric only up to the order of differentiation; use
  // the sorted index so the Cartan tensor is exactly symmetric.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      for (std::size_t k = j; k < n; ++k) {
        const Jet v = in.dg_dy(i, j, k);
        in.dg_dy(i, k, j) = in.dg_dy(j, i, k) = in.dg_dy(j, k, i) = in.dg_dy(k, i, j) = in.dg_dy(k, j, i) = v;
      }
  return in;
}

inline Jet half_energy_jet(const MetricSpec& m, std::span<const Jet> phase) {
  Jet L = m.half_energy(phase);
  if (!L.is_finite()) throw DomainError("metric not finite at evaluation point");
  return L;
}

}  // namespace detail

inline FinslerSample finsler_sample(const MetricSpec& m, std::span<const double> x, std::span<const double> y) {
  m.require_phase_point(x, y);
  const std::size_t n = m.dimension();
  const std::vector<Jet> phase = detail::phase_jets(x, y, 3);
  const Jet L = detail::half_energy_jet(m, phase);
  const auto in = detail::value_inputs(L, y);
  const auto t = detail::assemble_chern(in);

  FinslerSample s;
  s.x.assign(x.begin(), x.end());
  s.y.assign(y.begin(), y.end());
  s.F = t.F;
  const Jet F_jet = sqrt(L.truncated(1) * 2.0);
  for (std::size_t k = 0; k < n; ++k) s.dF_dy.push_back(F_jet.partial(MultiIndex::unit(2 * n, n + k)));
  s.g = in.g;
  s.g_inv = t.g_inv;
  s.dg_dx = in.dg_dx;
  s.A = t.A;
  s.gamma = t.gamma;
  s.N = t.N;
  s.chern = t.chern;
  return s;
}

inline double finsler_value(const MetricSpec& m, std::span<const double> x, std::span<const double> y) {
  m.require_phase_point(x, y);
  std::vector<double> xy(x.begin(), x.end());
  xy.insert(xy.end(), y.begin(), y.end());
  const double f = m.finsler_function(std::span<const double>(xy));
  if (!(f > 0.0)) throw NonPositiveError("Finsler function is not positive");
  return f;
}

inline constexpr double kDefaultPositiveDefiniteTolerance = 1e-10;

inline Matrix<double> fundamental_tensor(const MetricSpec& m, std::span<const double> x, std::span<const double> y,
                                         double tol_pd = kDefaultPositiveDefiniteTolerance) {
  m.require_phase_point(x, y);
  const std::size_t n = m.dimension();
  const Jet L = detail::half_energy_jet(m, detail::phase_jets(x, y, 2));
  Matrix<double> g(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) g(i, j) = g(j, i) = L.partial(MultiIndex::of_partial(2 * n, {n + i, n + j}));
  for (double minor : leading_minors(g))
    if (!(minor > tol_pd)) throw NotPositiveDefiniteError("fundamental tensor is not positive definite");
  return g;
}

inline Tensor3<double> cartan_tensor(const MetricSpec& m, std::span<const double> x, std::span<const double> y) {
  return finsler_sample(m, x, y).A;
}

inline Tensor3<double> formal_christoffel(const MetricSpec& m, std::span<const double> x,
                                          std::span<const double> y) {
  return finsler_sample(m, x, y).gamma;
}

inline Matrix<double> nonlinear_connection(const MetricSpec& m, std::span<const double> x,
                                           std::span<const double> y) {
  return finsler_sample(m, x, y).N;
}

inline Tensor3<double> chern_coefficients(const MetricSpec& m, std::span<const double> x,
                                          std::span<const double> y) {
  return finsler_sample(m, x, y).chern;
}

/// Chern coefficients as first-order jets over the phase coordinates, for
/// derivatives in both x and y.
inline Tensor3<Jet> chern_jets(const MetricSpec& m, std::span<const double> x, std::span<const double> y) {
  m.require_phase_point(x, y);
  const std::vector<Jet> phase = detail::phase_jets(x, y, 4);
  const Jet L = detail::half_energy_jet(m, phase);
  return detail::assemble_chern(detail::jet_inputs(L, phase)).chern;
}

struct StructuralResiduals {
  double torsion = 0.0;        // max |Chern^i_jk - Chern^i_kj|
  double compatibility = 0.0;  // max over (i, j, t) of the dx^t component
  double scale = 1.0;          // max(1, largest term in the compatibility sum)
};

inline StructuralResiduals structural_residuals(const FinslerSample& s) {
  const std::size_t n = s.g.dim();
  StructuralResiduals r;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) r.torsion = std::max(r.torsion, std::abs(s.chern(i, j, k) - s.chern(i, k, j)));

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t t = 0; t < n; ++t) {
        double a = 0.0, b = 0.0, c = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          a += s.g(k, j) * s.chern(k, i, t);
          b += s.g(i, k) * s.chern(k, j, t);
          c += s.A(i, j, k) * s.N(k, t);
        }
        c *= 2.0 / s.F;
        const double d = s.dg_dx(i, j, t);
        r.compatibility = std::max(r.compatibility, std::abs(d - a - b - c));
        r.scale = std::max({r.scale, std::abs(d), std::abs(a), std::abs(b), std::abs(c)});
      }
  return r;
}

inline StructuralResiduals chern_structural_residuals(const MetricSpec& m, std::span<const double> x,
                                                      std::span<const double> y) {
  return structural_residuals(finsler_sample(m, x, y));
}

/// |Chern(x, y) - Chern(x, y')| maximized over pairs of fiber samples.
inline double berwald_probe(const MetricSpec& m, std::span<const double> x,
                            const std::vector<std::vector<double>>& ys) {
  if (ys.size() < 2) throw DomainError("Berwald probe needs at least two fiber samples");
  std::vector<Tensor3<double>> c;
  for (const auto& y : ys) c.push_back(chern_coefficients(m, x, y));
  double d = 0.0;
  for (std::size_t a = 0; a < c.size(); ++a)
    for (std::size_t b = a + 1; b < c.size(); ++b) d = std::max(d, max_abs_diff(c[a], c[b]));
  return d;
}

/// sqrt(a^ij b_i b_j) of a Randers metric at x.
inline double randers_covector_norm(const MetricSpec& m, std::span<const double> x) {
  if (m.family() != MetricFamily::randers) throw NotRandersError("metric is not of Randers type");
  const std::size_t n = m.dimension();
  m.domain().require(x, "base point");
  Matrix<double> a(n);
  std::vector<double> b(n);
  for (std::size_t i = 0; i < n; ++i) {
    b[i] = m.covector()[i](x);
    for (std::size_t j = 0; j < n; ++j) a(i, j) = m.matrix()(i, j)(x);
  }
  const Matrix<double> a_inv = inverse(a);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s += a_inv(i, j) * b[i] * b[j];
  return std::sqrt(std::max(0.0, s));
}

namespace detail {

template <class Fn>
CheckRecord timed(const std::string& id, std::vector<double> point, Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  CheckRecord r;
  try {
    r = fn();
  } catch (const Error& e) {
    r = CheckRecord::failure(id, std::move(point), e.what());
  }
  r.elapsed = std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - start);
  return r;
}

}  // namespace detail

/// Homogeneity, positive-definiteness, Euler identity, Cartan trace and (for
/// Randers metrics) the one-form bound, at every sample of the plan.
inline std::vector<CheckRecord> metric_validity(const MetricSpec& m, const std::vector<SamplePoint>& plan,
                                                const Tolerances& tol = {}) {
  std::vector<CheckRecord> out;
  for (const auto& sp : plan) {
    if (m.family() == MetricFamily::randers)
      out.push_back(detail::timed("metric-validity.randers-bound", sp.x, [&] {
        return CheckRecord::evaluate("metric-validity.randers-bound", sp.x, randers_covector_norm(m, sp.x),
                                     1.0 - tol.randers_margin);
      }));
    for (const auto& y : sp.ys) {
      const std::vector<double> p = join(sp.x, y);
      out.push_back(detail::timed("metric-validity.homogeneity", p, [&] {
        const double f = finsler_value(m, sp.x, y);
        double worst = 0.0;
        for (double lambda : {0.5, 2.0, 3.0}) {
          std::vector<double> ly = y;
          for (double& v : ly) v *= lambda;
          worst = std::max(worst, std::abs(finsler_value(m, sp.x, ly) - lambda * f) / (lambda * f));
        }
        return CheckRecord::evaluate("metric-validity.homogeneity", p, worst, tol.homogeneity);
      }));
      out.push_back(detail::timed("metric-validity.positive-definite", p, [&] {
        const Matrix<double> g = fundamental_tensor(m, sp.x, y, 0.0);
        const auto minors = leading_minors(g);
        // shortfall of the smallest leading minor below tol_pd
        const double smallest = *std::min_element(minors.begin(), minors.end());
        return CheckRecord::evaluate("metric-validity.positive-definite", p, std::max(0.0, tol.tol_pd - smallest),
                                     0.0);
      }));
      out.push_back(detail::timed("metric-validity.euler", p, [&] {
        const FinslerSample s = finsler_sample(m, sp.x, y);
        double e = -s.F;
        for (std::size_t k = 0; k < y.size(); ++k) e += y[k] * s.dF_dy[k];
        return CheckRecord::evaluate("metric-validity.euler", p, std::abs(e) / s.F, tol.euler);
      }));
      out.push_back(detail::timed("metric-validity.cartan-trace", p, [&] {
        const FinslerSample s = finsler_sample(m, sp.x, y);
        const std::size_t n = y.size();
        double trace = 0.0, ynorm = 0.0;
        for (double v : y) ynorm += v * v;
        ynorm = std::sqrt(ynorm);
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) {
            double t = 0.0;
            for (std::size_t k = 0; k < n; ++k) t += s.A(i, j, k) * y[k];
            trace = std::max(trace, std::abs(t));
          }
        const double scale = std::max(1.0, max_abs(s.A) * ynorm);
        return CheckRecord::evaluate("metric-validity.cartan-trace", p, trace / scale, tol.cartan_trace);
      }));
    }
  }
  return out;
}

}  // namespace finsym
