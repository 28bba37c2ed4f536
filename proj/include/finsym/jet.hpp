#pragma once

/// Truncated multivariate Taylor arithmetic.
///
/// A Jet stores the Taylor coefficients of a smooth scalar function around a
/// point, for every monomial of total degree <= order. Coefficients are keyed
/// by canonical multi-indices, so mixed partials are symmetric structurally.
/// The partial derivative for multi-index a is coeff(a) * a!.
///
/// Monomials are enumerated graded by degree, so the order-k space is a
/// prefix of the order-(k+1) space and truncation is a resize.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "finsym/errors.hpp"

namespace finsym {

inline constexpr int kMaxJetOrder = 4;

class MultiIndex {
 public:
  MultiIndex() = default;

  explicit MultiIndex(std::vector<int> exponents) : exps_(std::move(exponents)) {
    for (int e : exps_)
      if (e < 0) throw OrderError("multi-index exponents must be nonnegative");
  }

  MultiIndex(std::initializer_list<int> exponents) : MultiIndex(std::vector<int>(exponents)) {}

  static MultiIndex zero(std::size_t num_vars) { return MultiIndex(std::vector<int>(num_vars, 0)); }

  static MultiIndex unit(std::size_t num_vars, std::size_t var) {
    MultiIndex m = zero(num_vars);
    m.exps_.at(var) = 1;
    return m;
  }

  /// Multi-index of the mixed partial d/dx_{v0} d/dx_{v1} ... .
  static MultiIndex of_partial(std::size_t num_vars, std::span<const std::size_t> vars) {
    MultiIndex m = zero(num_vars);
    for (std::size_t v : vars) ++m.exps_.at(v);
    return m;
  }
  static MultiIndex of_partial(std::size_t num_vars, std::initializer_list<std::size_t> vars) {
    return of_partial(num_vars, std::span<const std::size_t>(vars.begin(), vars.size()));
  }

  std::size_t num_vars() const noexcept { return exps_.size(); }
  int operator[](std::size_t v) const { return exps_.at(v); }
  const std::vector<int>& exponents() const noexcept { return exps_; }

  int degree() const noexcept {
    int d = 0;
    for (int e : exps_) d += e;
    return d;
  }

  /// Product of factorials of the exponents.
  double factorial() const noexcept {
    double f = 1.0;
    for (int e : exps_)
      for (int k = 2; k <= e; ++k) f *= k;
    return f;
  }

  MultiIndex plus(std::size_t var) const {
    MultiIndex m = *this;
    ++m.exps_.at(var);
    return m;
  }

  auto operator<=>(const MultiIndex&) const = default;

 private:
  std::vector<int> exps_;
};

/// Immutable monomial tables for a (num_vars, order) pair.
class JetSpace {
 public:
  struct ProductTerm {
    std::uint32_t lhs, rhs, out;
  };
  struct DerivativeTerm {
    std::uint32_t from, to;
    double factor;
  };

  static std::shared_ptr<const JetSpace> make(std::size_t num_vars, int order) {
    if (order < 0 || order > kMaxJetOrder)
      throw OrderError("jet order " + std::to_string(order) + " outside [0, " + std::to_string(kMaxJetOrder) + "]");
    if (num_vars == 0 || num_vars > kMaxVars) throw OrderError("jet variable count outside [1, 16]");
    std::shared_ptr<const JetSpace> lower = order > 0 ? make(num_vars, order - 1) : nullptr;
    return std::shared_ptr<const JetSpace>(new JetSpace(num_vars, order, std::move(lower)));
  }

  /// Shared instance for (num_vars, order). Entries are immutable once built,
  /// so handing them to concurrent evaluations is safe.
  static std::shared_ptr<const JetSpace> cached(std::size_t num_vars, int order) {
    static std::mutex mutex;
    static std::map<std::pair<std::size_t, int>, std::shared_ptr<const JetSpace>> table;
    std::lock_guard<std::mutex> lock(mutex);
    auto& slot = table[{num_vars, order}];
    if (!slot) slot = make(num_vars, order);
    return slot;
  }

  std::size_t num_vars() const noexcept { return num_vars_; }
  int order() const noexcept { return order_; }
  std::size_t size() const noexcept { return monomials_.size(); }
  const MultiIndex& monomial(std::size_t k) const { return monomials_.at(k); }
  const std::shared_ptr<const JetSpace>& lower() const noexcept { return lower_; }

  std::optional<std::size_t> find(const MultiIndex& m) const {
    if (m.num_vars() != num_vars_ || m.degree() > order_) return std::nullopt;
    auto it = index_.find(key(m.exponents()));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::span<const ProductTerm> products() const noexcept { return products_; }
  std::span<const DerivativeTerm> derivative_terms(std::size_t var) const { return derivatives_.at(var); }

  /// Space of the given (lower or equal) order, walking the lower() chain.
  static const std::shared_ptr<const JetSpace>& at_order(const std::shared_ptr<const JetSpace>& space, int order) {
    const std::shared_ptr<const JetSpace>* s = &space;
    while ((*s)->order() > order) s = &(*s)->lower();
    return *s;
  }

 private:
  static constexpr std::size_t kMaxVars = 16;

  JetSpace(std::size_t num_vars, int order, std::shared_ptr<const JetSpace> lower)
      : num_vars_(num_vars), order_(order), lower_(std::move(lower)) {
    if (lower_) {
      monomials_ = lower_->monomials_;
      index_ = lower_->index_;
    } else {
      monomials_.push_back(MultiIndex::zero(num_vars));
      index_.emplace(key(monomials_.back().exponents()), 0);
    }
    if (order > 0) {
      std::vector<int> exps(num_vars, 0);
      enumerate_degree(exps, 0, order);
    }

    for (std::uint32_t a = 0; a < monomials_.size(); ++a) {
      const int da = monomials_[a].degree();
      for (std::uint32_t b = 0; b < monomials_.size(); ++b) {
        if (da + monomials_[b].degree() > order_) continue;
        std::vector<int> sum = monomials_[a].exponents();
        for (std::size_t v = 0; v < num_vars; ++v) sum[v] += monomials_[b][v];
        products_.push_back({a, b, index_.at(key(sum))});
      }
    }

    derivatives_.resize(num_vars);
    for (std::size_t v = 0; v < num_vars; ++v)
      for (std::uint32_t m = 0; m < monomials_.size(); ++m) {
        const int e = monomials_[m][v];
        if (e == 0) continue;
        std::vector<int> lowered = monomials_[m].exponents();
        --lowered[v];
        derivatives_[v].push_back({m, index_.at(key(lowered)), static_cast<double>(e)});
      }
  }

  void enumerate_degree(std::vector<int>& exps, std::size_t var, int remaining) {
    if (var + 1 == num_vars_) {
      exps[var] = remaining;
      monomials_.emplace_back(exps);
      index_.emplace(key(exps), static_cast<std::uint32_t>(monomials_.size() - 1));
      exps[var] = 0;
      return;
    }
    for (int e = remaining; e >= 0; --e) {
      exps[var] = e;
      enumerate_degree(exps, var + 1, remaining - e);
    }
    exps[var] = 0;
  }

  static std::uint64_t key(const std::vector<int>& exps) {
    std::uint64_t k = 0;
    for (int e : exps) k = k * (kMaxJetOrder + 1) + static_cast<std::uint64_t>(e);
    return k;
  }

  std::size_t num_vars_;
  int order_;
  std::shared_ptr<const JetSpace> lower_;
  std::vector<MultiIndex> monomials_;
  std::unordered_map<std::uint64_t, std::uint32_t> index_;
  std::vector<ProductTerm> products_;
  std::vector<std::vector<DerivativeTerm>> derivatives_;
};

using JetSpacePtr = std::shared_ptr<const JetSpace>;

class Jet {
 public:
  /// An empty jet; only valid as an assignment target.
  Jet() = default;

  Jet(JetSpacePtr space, double value) : space_(std::move(space)), c_(space_->size(), 0.0) { c_[0] = value; }

  static Jet variable(JetSpacePtr space, std::size_t var, double value) {
    if (var >= space->num_vars()) throw OrderError("jet variable index out of range");
    Jet j(space, value);
    if (space->order() > 0) j.c_[*space->find(MultiIndex::unit(space->num_vars(), var))] = 1.0;
    return j;
  }

  bool empty() const noexcept { return !space_; }
  const JetSpacePtr& space() const noexcept { return space_; }
  int order() const noexcept { return space_->order(); }
  std::size_t num_vars() const noexcept { return space_->num_vars(); }
  double value() const noexcept { return c_[0]; }
  std::span<const double> coeffs() const noexcept { return c_; }

  double coeff(const MultiIndex& m) const {
    auto k = space_->find(m);
    if (!k) throw OrderError("multi-index exceeds jet order or variable count");
    return c_[*k];
  }

  /// The partial derivative for multi-index m: coefficient times m!.
  double partial(const MultiIndex& m) const { return coeff(m) * m.factorial(); }

  /// d/d(var) as a jet one order lower.
  Jet derivative(std::size_t var) const {
    if (order() == 0) throw OrderError("cannot differentiate an order-0 jet");
    Jet out(space_->lower(), 0.0);
    for (const auto& t : space_->derivative_terms(var)) out.c_[t.to] = t.factor * c_[t.from];
    return out;
  }

  Jet truncated(int order) const {
    if (order > this->order()) throw OrderError("cannot raise jet order by truncation");
    Jet out;
    out.space_ = JetSpace::at_order(space_, order);
    out.c_.assign(c_.begin(), c_.begin() + static_cast<std::ptrdiff_t>(out.space_->size()));
    return out;
  }

  bool is_finite() const noexcept {
    return std::all_of(c_.begin(), c_.end(), [](double v) { return std::isfinite(v); });
  }

  Jet operator-() const {
    Jet out = *this;
    for (double& v : out.c_) v = -v;
    return out;
  }

  Jet& operator+=(const Jet& o) { return accumulate(o, 1.0); }
  Jet& operator-=(const Jet& o) { return accumulate(o, -1.0); }
  Jet& operator+=(double s) {
    c_[0] += s;
    return *this;
  }
  Jet& operator-=(double s) {
    c_[0] -= s;
    return *this;
  }
  Jet& operator*=(double s) {
    for (double& v : c_) v *= s;
    return *this;
  }
  Jet& operator/=(double s) {
    if (s == 0.0) throw DomainError("division by zero");
    for (double& v : c_) v /= s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator+(double s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, double s) { return a -= s; }
  friend Jet operator-(double s, const Jet& a) { return (-a) += s; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator/(Jet a, double s) { return a /= s; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    check_compatible(a, b);
    const JetSpacePtr& space = a.order() <= b.order() ? a.space_ : b.space_;
    Jet out(space, 0.0);
    for (const auto& t : space->products()) out.c_[t.out] += a.c_[t.lhs] * b.c_[t.rhs];
    return out;
  }

  friend Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
  friend Jet operator/(double s, const Jet& b) { return reciprocal(b) * s; }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }
  Jet& operator/=(const Jet& o) { return *this = *this / o; }

  /// f(a) for a univariate f given its scaled Taylor coefficients at a.value():
  /// taylor[m] = f^(m)(a0) / m!, with taylor.size() > order.
  friend Jet compose(const Jet& a, std::span<const double> taylor) {
    const int k = a.order();
    Jet h = a;
    h.c_[0] = 0.0;
    Jet r(a.space_, taylor[static_cast<std::size_t>(k)]);
    for (int m = k - 1; m >= 0; --m) {
      r = r * h;
      r.c_[0] += taylor[static_cast<std::size_t>(m)];
    }
    if (!r.is_finite()) throw DomainError("non-finite jet coefficient");
    return r;
  }

  friend Jet reciprocal(const Jet& a) {
    const double a0 = a.value();
    if (a0 == 0.0 || !std::isfinite(a0)) throw DomainError("reciprocal of zero");
    std::vector<double> t(static_cast<std::size_t>(a.order()) + 1);
    double p = 1.0 / a0;
    for (std::size_t m = 0; m < t.size(); ++m) {
      t[m] = (m % 2 == 0 ? 1.0 : -1.0) * p;
      p /= a0;
    }
    return compose(a, t);
  }

  /// Real power. Integer exponents use repeated multiplication and accept
  /// any base (nonzero when negative); other exponents need a positive base.
  friend Jet pow(const Jet& a, double p) {
    if (p == std::round(p) && std::abs(p) <= 64.0) {
      const long n = static_cast<long>(std::abs(p));
      Jet result(a.space_, 1.0);
      Jet base = a;
      for (long e = n; e > 0; e >>= 1) {
        if (e & 1) result = result * base;
        if (e > 1) base = base * base;
      }
      return p < 0 ? reciprocal(result) : result;
    }
    const double a0 = a.value();
    if (!(a0 > 0.0)) {
      if (a0 == 0.0 && p > 0.0 && a.order() == 0) return Jet(a.space_, 0.0);
      throw DomainError("fractional power of a nonpositive argument");
    }
    std::vector<double> t(static_cast<std::size_t>(a.order()) + 1);
    double binom = 1.0;
    for (std::size_t m = 0; m < t.size(); ++m) {
      t[m] = binom * std::pow(a0, p - static_cast<double>(m));
      binom *= (p - static_cast<double>(m)) / static_cast<double>(m + 1);
    }
    return compose(a, t);
  }

  friend Jet sqrt(const Jet& a) {
    const double a0 = a.value();
    if (!(a0 > 0.0)) {
      if (a0 == 0.0 && a.order() == 0) return Jet(a.space_, 0.0);
      throw DomainError("sqrt of a nonpositive argument");
    }
    const double s = std::sqrt(a0);
    std::vector<double> t(static_cast<std::size_t>(a.order()) + 1);
    double binom = 1.0;
    double scale = s;
    for (std::size_t m = 0; m < t.size(); ++m) {
      t[m] = binom * scale;
      binom *= (0.5 - static_cast<double>(m)) / static_cast<double>(m + 1);
      scale /= a0;
    }
    return compose(a, t);
  }

 private:
  static void check_compatible(const Jet& a, const Jet& b) {
    if (a.empty() || b.empty()) throw OrderError("arithmetic on an empty jet");
    if (a.num_vars() != b.num_vars()) throw OrderError("jets over different variable counts");
  }

  Jet& accumulate(const Jet& o, double sign) {
    check_compatible(*this, o);
    if (o.order() < order()) *this = truncated(o.order());
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += sign * o.c_[k];
    return *this;
  }

  JetSpacePtr space_;
  std::vector<double> c_;
};

inline double value_of(const Jet& j) { return j.value(); }

/// Fields accepted by jet_eval: callables mapping jet coordinates to a jet.
template <class F>
concept JetField = std::invocable<const F&, std::span<const Jet>>;

/// Jet of `field` at `point`, up to total derivative order `order`.
template <JetField F>
Jet jet_eval(const F& field, std::span<const double> point, int order) {
  if (order > kMaxJetOrder) throw OrderError("derivative order " + std::to_string(order) + " exceeds 4");
  if (point.empty()) throw DomainError("empty evaluation point");
  const JetSpacePtr space = JetSpace::cached(point.size(), order);
  std::vector<Jet> vars;
  vars.reserve(point.size());
  for (std::size_t v = 0; v < point.size(); ++v) vars.push_back(Jet::variable(space, v, point[v]));
  Jet out = field(std::span<const Jet>(vars));
  if (out.order() != order || out.num_vars() != point.size())
    throw OrderError("field returned a jet outside the evaluation space");
  if (!out.is_finite()) throw DomainError("field not finite at evaluation point");
  return out;
}

inline double jet_partial(const Jet& jet, const MultiIndex& idx) {
  if (idx.degree() > jet.order())
    throw OrderError("multi-index degree " + std::to_string(idx.degree()) + " exceeds jet order " +
                     std::to_string(jet.order()));
  return jet.partial(idx);
}

/// Jet coordinates for `point` in a fresh space.
inline std::vector<Jet> jet_variables(std::span<const double> point, int order) {
  if (order > kMaxJetOrder) throw OrderError("derivative order exceeds 4");
  const JetSpacePtr space = JetSpace::cached(point.size(), order);
  std::vector<Jet> vars;
  vars.reserve(point.size());
  for (std::size_t v = 0; v < point.size(); ++v) vars.push_back(Jet::variable(space, v, point[v]));
  return vars;
}

}  // namespace finsym
