#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "finsym/jet.hpp"

using namespace finsym;

namespace {

std::vector<Jet> vars(std::vector<double> p, int order) { return jet_variables(p, order); }

double d(const Jet& j, std::initializer_list<int> e) { return jet_partial(j, MultiIndex(e)); }

Jet random_jet(const JetSpacePtr& space, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Jet j(space, 0.0);
  for (std::size_t v = 0; v < space->num_vars(); ++v) j = j + Jet::variable(space, v, 0.0) * u(rng);
  Jet out(space, 1.5 + 0.5 * u(rng));
  out = out + j + j * j * u(rng) + j * j * j * u(rng);
  return out;
}

}  // namespace

TEST(MultiIndex, DegreeFactorialAndPartialSpelling) {
  const MultiIndex m = MultiIndex::of_partial(3, {0, 2, 2});
  EXPECT_EQ(m, MultiIndex({1, 0, 2}));
  EXPECT_EQ(m.degree(), 3);
  EXPECT_DOUBLE_EQ(m.factorial(), 2.0);
  EXPECT_EQ(MultiIndex::unit(3, 1).plus(1), MultiIndex({0, 2, 0}));
  EXPECT_THROW(MultiIndex({-1, 0}), OrderError);
}

TEST(JetSpace, MonomialCountIsBinomial) {
  EXPECT_EQ(JetSpace::make(2, 3)->size(), 10u);
  EXPECT_EQ(JetSpace::make(4, 4)->size(), 70u);
  EXPECT_EQ(JetSpace::make(8, 4)->size(), 495u);
  EXPECT_EQ(JetSpace::make(16, 1)->size(), 17u);
  EXPECT_THROW(JetSpace::make(2, 5), OrderError);
  EXPECT_THROW(JetSpace::make(17, 1), OrderError);
  EXPECT_EQ(JetSpace::cached(3, 2), JetSpace::cached(3, 2));
}

TEST(Jet, PolynomialPartialsMatchHandDerivatives) {
  // f = x^2 y at (2, 3)
  const auto v = vars({2.0, 3.0}, 3);
  const Jet f = v[0] * v[0] * v[1];
  EXPECT_DOUBLE_EQ(f.value(), 12.0);
  EXPECT_DOUBLE_EQ(d(f, {1, 0}), 12.0);
  EXPECT_DOUBLE_EQ(d(f, {0, 1}), 4.0);
  EXPECT_DOUBLE_EQ(d(f, {2, 0}), 6.0);
  EXPECT_DOUBLE_EQ(d(f, {1, 1}), 4.0);
  EXPECT_DOUBLE_EQ(d(f, {0, 2}), 0.0);
  EXPECT_DOUBLE_EQ(d(f, {2, 1}), 2.0);
  EXPECT_DOUBLE_EQ(d(f, {3, 0}), 0.0);
}

TEST(Jet, UnivariateFunctionsToFourthOrder) {
  const auto v = vars({4.0}, 4);
  const Jet s = sqrt(v[0]);
  const double expect_sqrt[] = {2.0, 0.25, -1.0 / 32.0, 3.0 / 256.0, -15.0 / 2048.0};
  for (int k = 0; k <= 4; ++k) EXPECT_NEAR(d(s, {k}), expect_sqrt[k], 1e-15) << k;

  const auto w = vars({2.0}, 4);
  const Jet r = reciprocal(w[0]);
  const double expect_rec[] = {0.5, -0.25, 0.25, -0.375, 0.75};
  for (int k = 0; k <= 4; ++k) EXPECT_NEAR(d(r, {k}), expect_rec[k], 1e-15) << k;

  const auto one = vars({1.0}, 4);
  const Jet p = pow(one[0], 2.5);
  const double expect_pow[] = {1.0, 2.5, 3.75, 1.875, -0.9375};
  for (int k = 0; k <= 4; ++k) EXPECT_NEAR(d(p, {k}), expect_pow[k], 1e-14) << k;
}

TEST(Jet, IntegerPowersAcceptNegativeBase) {
  const auto v = vars({-2.0}, 3);
  const Jet c = pow(v[0], 3.0);
  EXPECT_DOUBLE_EQ(c.value(), -8.0);
  EXPECT_DOUBLE_EQ(d(c, {1}), 12.0);
  EXPECT_DOUBLE_EQ(d(c, {2}), -12.0);
  EXPECT_DOUBLE_EQ(d(c, {3}), 6.0);
  const Jet inv = pow(v[0], -2.0);
  EXPECT_DOUBLE_EQ(inv.value(), 0.25);
  EXPECT_DOUBLE_EQ(d(inv, {1}), 0.25);  // -2 x^-3 at -2
}

TEST(Jet, DomainErrors) {
  const auto v = vars({-1.0, 0.0}, 2);
  EXPECT_THROW(sqrt(v[0]), DomainError);
  EXPECT_THROW(pow(v[0], 0.5), DomainError);
  EXPECT_THROW(reciprocal(v[1]), DomainError);
  EXPECT_THROW(v[0] / v[1], DomainError);
}

TEST(Jet, MixedOrdersTruncateToTheLower) {
  const auto a = vars({1.0, 2.0}, 3);
  const auto b = vars({1.0, 2.0}, 1);
  const Jet s = a[0] * a[0] + b[1];
  EXPECT_EQ(s.order(), 1);
  EXPECT_DOUBLE_EQ(s.value(), 3.0);
  EXPECT_DOUBLE_EQ(d(s, {1, 0}), 2.0);
  EXPECT_THROW(jet_partial(s, MultiIndex({2, 0})), OrderError);
  const auto c = vars({1.0, 2.0, 3.0}, 2);
  EXPECT_THROW(a[0] + c[0], OrderError);
}

TEST(Jet, DerivativeLowersOrder) {
  const auto v = vars({2.0, 3.0}, 3);
  const Jet f = v[0] * v[0] * v[1];
  const Jet fx = f.derivative(0);
  EXPECT_EQ(fx.order(), 2);
  EXPECT_DOUBLE_EQ(fx.value(), 12.0);
  EXPECT_DOUBLE_EQ(d(fx, {1, 1}), 2.0);
}

TEST(JetEval, RejectsOrderAboveFourAndMismatchedResults) {
  const std::vector<double> p{0.5, 0.25};
  auto f = [](std::span<const Jet> x) { return x[0] * x[1]; };
  EXPECT_NO_THROW(jet_eval(f, p, 4));
  EXPECT_THROW(jet_eval(f, p, 5), OrderError);
  auto wrong = [](std::span<const Jet> x) { return x[0].truncated(1); };
  EXPECT_THROW(jet_eval(wrong, p, 3), OrderError);
  auto blowup = [](std::span<const Jet> x) { return x[0] * 1e308 * 1e308; };
  EXPECT_THROW(jet_eval(blowup, p, 1), DomainError);
}

// Algebraic identities on random jets.
TEST(JetProperties, FieldIdentitiesHoldOnRandomJets) {
  std::mt19937_64 rng(11);
  const auto space = JetSpace::cached(3, 4);
  for (int trial = 0; trial < 50; ++trial) {
    const Jet a = random_jet(space, rng);
    const Jet b = random_jet(space, rng);
    const Jet q = (a * b) / b - a;
    const Jet cube = pow(a, 3.0) - a * a * a;
    const Jet root = sqrt(a) * sqrt(a) - a;
    const Jet half = pow(a, 1.5) - a * sqrt(a);
    for (const Jet* j : {&q, &cube, &root, &half})
      for (double c : j->coeffs()) EXPECT_NEAR(c, 0.0, 1e-11);
  }
}

TEST(JetProperties, LeibnizRuleForDerivative) {
  std::mt19937_64 rng(12);
  const auto space = JetSpace::cached(2, 4);
  for (int trial = 0; trial < 20; ++trial) {
    const Jet a = random_jet(space, rng);
    const Jet b = random_jet(space, rng);
    const Jet lhs = (a * b).derivative(1);
    const Jet rhs = a.derivative(1) * b.truncated(3) + a.truncated(3) * b.derivative(1);
    for (std::size_t k = 0; k < lhs.coeffs().size(); ++k) EXPECT_NEAR(lhs.coeffs()[k], rhs.coeffs()[k], 1e-12);
  }
}
