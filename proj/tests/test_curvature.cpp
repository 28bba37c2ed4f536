#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "finsym/curvature.hpp"

using namespace finsym;

namespace {

ScalarField field(const std::string& t, std::size_t n) { return parse_field(t, coordinate_names(n)); }

TwoFormField conformal_form(const std::string& f) {
  std::map<std::pair<std::size_t, std::size_t>, ScalarField> e;
  e.emplace(std::pair<std::size_t, std::size_t>{0, 1}, field(f, 2));
  return TwoFormField::from_entries(2, e);
}

const char* kSphereFactor = "4/(1 + x1^2 + x2^2)^2";

FedosovScenario sphere() {
  return FedosovScenario(MetricSpec::parse_riemannian({{kSphereFactor, "0"}, {"0", kSphereFactor}},
                                                      DomainBox::cube(2, -1, 1)),
                         conformal_form(kSphereFactor), VectorFieldSpec::parse({"1 + x2^2", "x1"}));
}

FedosovScenario unimodular() {
  return FedosovScenario(
      MetricSpec::parse_riemannian({{"1 + x2^2", "x2"}, {"x2", "1"}}, DomainBox::cube(2, -1, 1)), standard_form(1),
      VectorFieldSpec::parse({"1", "x1"}));
}

FedosovScenario polar() {
  return FedosovScenario(MetricSpec::parse_riemannian({{"1", "0"}, {"0", "x1^2"}}, DomainBox({{1, 3}, {-3, 3}})),
                         conformal_form("x1"), VectorFieldSpec::parse({"1", "0.5*x1"}));
}

FedosovScenario randers() {
  const MetricSpec m =
      MetricSpec::parse_randers({{"1", "0"}, {"0", "1"}}, {"-0.1*x2", "0.1*x1"}, DomainBox::cube(2, -1, 1));
  return FedosovScenario(m, randers_two_form(m.covector()), VectorFieldSpec::parse({"1", "0"}));
}

FedosovScenario unimodular4() {
  return FedosovScenario(
      MetricSpec::parse_riemannian(
          {{"1 + x3^2", "0", "x3", "0"}, {"0", "1", "0", "x2"}, {"x3", "0", "1", "0"}, {"0", "x2", "0", "1 + x2^2"}},
          DomainBox::cube(4, -1, 1)),
      standard_form(2), VectorFieldSpec::parse({"1", "x3", "0.5", "x1"}));
}

// product of two round spheres in the planes (x1, x3) and (x2, x4)
FedosovScenario sphere4() {
  const std::string a = "4/(1 + x1^2 + x3^2)^2", b = "4/(1 + x2^2 + x4^2)^2";
  std::vector<std::vector<std::string>> g(4, std::vector<std::string>(4, "0"));
  g[0][0] = g[2][2] = a;
  g[1][1] = g[3][3] = b;
  std::map<std::pair<std::size_t, std::size_t>, ScalarField> e;
  e.emplace(std::pair<std::size_t, std::size_t>{0, 2}, field(a, 4));
  e.emplace(std::pair<std::size_t, std::size_t>{1, 3}, field(b, 4));
  return FedosovScenario(MetricSpec::parse_riemannian(g, DomainBox::cube(4, -1, 1)),
                         TwoFormField::from_entries(4, e), VectorFieldSpec::parse({"1", "x3", "x1^2", "0.5"}));
}

std::vector<std::vector<double>> points(std::uint64_t seed, std::size_t n, double lo, double hi, int count) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<std::vector<double>> out;
  for (int i = 0; i < count; ++i) {
    std::vector<double> p(n);
    for (double& v : p) v = u(rng);
    out.push_back(p);
  }
  return out;
}

// K (g_ki delta^l_j - g_ji delta^l_k)
Tensor4<double> constant_curvature(const Matrix<double>& g, double k_curv) {
  const std::size_t n = g.dim();
  Tensor4<double> r(n, 0.0);
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
          r(l, i, j, k) = k_curv * ((l == j ? g(k, i) : 0.0) - (l == k ? g(j, i) : 0.0));
  return r;
}

}  // namespace

TEST(Curvature, SphereMatchesConstantCurvatureFormula) {
  const FedosovScenario s = sphere();
  for (const auto& x : points(1, 2, -0.9, 0.9, 15)) {
    const CurvatureAtPoint c = curvature_induced(s, x);
    const Matrix<double> g = fundamental_tensor(s.metric, x, vector_field_values(s.field, x));
    EXPECT_LE(max_abs_diff(c.up, constant_curvature(g, 1.0)), 1e-10 * c.scale);
  }
}

TEST(Curvature, UnimodularFrozenComponents) {
  // reference values from tests/oracles/finsler_oracles.py
  const std::vector<double> x{0.2, 0.4};
  const CurvatureAtPoint c = curvature_induced(unimodular(), x);
  EXPECT_NEAR(c.up(0, 1, 0, 1), -1.0, 1e-12);
  EXPECT_NEAR(c.up(1, 1, 0, 1), 0.4, 1e-12);
  EXPECT_NEAR(c.up(0, 1, 1, 0), 1.0, 1e-12);
  const ConnectionCoefficients g = induce_connection(unimodular(), x);
  EXPECT_NEAR(g(0, 0, 1), 0.4, 1e-13);
  EXPECT_NEAR(g(1, 0, 0), -0.464, 1e-13);
}

TEST(Curvature, PolarChartIsFlat) {
  for (const auto& x : points(2, 2, 1.1, 2.9, 15)) {
    const CurvatureAtPoint c = curvature_induced(polar(), x);
    EXPECT_LE(max_abs(c.up), 1e-12 * c.scale);
    EXPECT_LE(max_abs(curvature_by_finite_differences(polar(), x).up), 1e-7);
  }
}

TEST(Curvature, AgreesWithFiniteDifferences) {
  for (const FedosovScenario& s : {sphere(), unimodular(), randers()})
    for (const auto& x : points(3, 2, -0.8, 0.8, 8)) {
      const CurvatureAtPoint a = curvature_induced(s, x);
      const CurvatureAtPoint b = curvature_by_finite_differences(s, x);
      EXPECT_LE(max_abs_diff(a.up, b.up), 1e-6 * a.scale);
    }
}

TEST(Curvature, AntisymmetricInLastPairAndFirstBianchi) {
  for (const FedosovScenario& s : {sphere4(), unimodular4()})
    for (const auto& x : points(4, 4, -0.8, 0.8, 4)) {
      const CurvatureAtPoint c = curvature_induced(s, x);
      const std::size_t n = c.dimension();
      for (std::size_t l = 0; l < n; ++l)
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) EXPECT_EQ(c.up(l, i, j, k), -c.up(l, i, k, j));
      EXPECT_LE(first_bianchi_residual(c.up), 1e-10 * c.scale);
    }
}

TEST(Curvature, LoweringWithStandardForm) {
  const std::vector<double> x{0.2, 0.4};
  const CurvatureAtPoint c = curvature_induced(unimodular(), x);
  const Tensor4<double> low = lower_curvature(c, standard_form(1), x);
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t k = 0; k < 2; ++k)
      for (std::size_t l = 0; l < 2; ++l) {
        EXPECT_EQ(low(0, j, k, l), c.up(1, j, k, l));
        EXPECT_EQ(low(1, j, k, l), -c.up(0, j, k, l));
      }
  EXPECT_THROW(lower_curvature(c, standard_form(2), std::vector<double>{0, 0, 0, 0}), DimensionMismatchError);
}

TEST(Bianchi, ContractedConditionInFourDimensions) {
  for (const FedosovScenario& s : {sphere4(), unimodular4()})
    for (const auto& x : points(5, 4, -0.8, 0.8, 4)) {
      const BianchiResidual r = bianchi_contracted_residual(s, x);
      EXPECT_LE(r.direct, 1e-9 * r.scale);
      EXPECT_LE(r.assembled, 1e-9 * r.scale);
      EXPECT_LE(r.two_path, 1e-9 * r.scale);
      EXPECT_LE(r.uncontracted, 1e-9 * r.scale);
    }
}

TEST(Bianchi, NeedsTwoForm) {
  const FedosovScenario s(MetricSpec::parse_custom("sqrt(y1^2 + y2^2)", 2, DomainBox::cube(2, -1, 1)), std::nullopt,
                          VectorFieldSpec::parse({"1", "0"}));
  EXPECT_THROW(bianchi_contracted_residual(s, std::vector<double>{0, 0}), DimensionMismatchError);
}

TEST(PairSymmetry, HoldsWhenFormIsPreserved) {
  for (const FedosovScenario& s : {sphere(), unimodular()})
    for (const auto& x : points(6, 2, -0.9, 0.9, 10)) {
      const PairSymmetryResidual r = pair_symmetry_residual(s, x);
      EXPECT_LE(r.lowered, 1e-9 * r.scale);
      EXPECT_LE(r.two_path, 1e-9 * r.scale);
    }
  for (const auto& x : points(6, 2, 1.1, 2.9, 10)) {
    const PairSymmetryResidual r = pair_symmetry_residual(polar(), x);
    EXPECT_LE(r.lowered, 1e-9 * r.scale);
  }
  for (const FedosovScenario& s : {sphere4(), unimodular4()}) {
    const PairSymmetryResidual r = pair_symmetry_residual(s, std::vector<double>{0.3, -0.1, 0.6, 0.2});
    EXPECT_LE(r.lowered, 1e-9 * r.scale);
    EXPECT_LE(r.two_path, 1e-9 * r.scale);
  }
}

TEST(PairSymmetry, FailsForRandersControl) {
  double worst = 0.0;
  for (const auto& x : points(7, 2, -0.8, 0.8, 10)) {
    const PairSymmetryResidual r = pair_symmetry_residual(randers(), x);
    EXPECT_LE(r.two_path, 1e-9 * r.scale);
    worst = std::max(worst, r.lowered);
  }
  EXPECT_GT(worst, 1e-5);
}
