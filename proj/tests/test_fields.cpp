#include <gtest/gtest.h>

#include <vector>

#include "finsym/fields.hpp"

using namespace finsym;

TEST(VectorField, ValuesAndJets) {
  const VectorFieldSpec w = VectorFieldSpec::parse({"1 + x2^2", "x1"});
  const std::vector<double> x{0.5, 2.0};
  const auto v = vector_field_values(w, x);
  EXPECT_DOUBLE_EQ(v[0], 5.0);
  EXPECT_DOUBLE_EQ(v[1], 0.5);
  const auto j = eval_vector_field(w, x, 2);
  EXPECT_DOUBLE_EQ(j[0].partial(MultiIndex({0, 1})), 4.0);
  EXPECT_DOUBLE_EQ(j[0].partial(MultiIndex({0, 2})), 2.0);
  EXPECT_DOUBLE_EQ(j[1].partial(MultiIndex({1, 0})), 1.0);
  EXPECT_THROW(eval_vector_field(w, x, 3), OrderError);
}

TEST(VectorField, ZeroVectorRejected) {
  const VectorFieldSpec w = VectorFieldSpec::parse({"x1", "x2"});
  const std::vector<double> origin{0.0, 0.0}, near{1e-7, 0.0}, ok{1e-3, 0.0};
  EXPECT_THROW(vector_field_values(w, origin), ZeroVectorError);
  EXPECT_THROW(vector_field_values(w, near), ZeroVectorError);
  EXPECT_NO_THROW(vector_field_values(w, ok));
  const VectorFieldSpec strict = VectorFieldSpec::parse({"x1", "x2"}, 1e-2);
  EXPECT_THROW(eval_vector_field(strict, ok, 1), ZeroVectorError);
}

TEST(Chart, IdentityJacobians) {
  const ChartMap id = ChartMap::identity(2);
  const std::vector<double> x{0.3, -0.2};
  const ChartJacobians j = chart_jacobians(id, x);
  EXPECT_EQ(j.xhat, x);
  EXPECT_EQ(max_abs_diff(j.forward, identity_matrix(2)), 0.0);
  EXPECT_EQ(max_abs_diff(j.inverse, identity_matrix(2)), 0.0);
  EXPECT_EQ(max_abs(j.inverse_second), 0.0);
}

TEST(Chart, QuadraticChartDerivatives) {
  const ChartMap m = ChartMap::parse({"x1", "x2 + x1^2/2"}, {"x1", "x2 - x1^2/2"}, DomainBox::whole(2),
                                     DomainBox::whole(2));
  const std::vector<double> x{0.6, 0.1};
  const ChartJacobians j = chart_jacobians(m, x);
  EXPECT_DOUBLE_EQ(j.xhat[1], 0.1 + 0.18);
  EXPECT_DOUBLE_EQ(j.forward(1, 0), 0.6);
  EXPECT_DOUBLE_EQ(j.inverse(1, 0), -0.6);
  EXPECT_DOUBLE_EQ(j.inverse_second(1, 0, 0), -1.0);
  EXPECT_DOUBLE_EQ(j.inverse_second(0, 0, 0), 0.0);
}

TEST(Chart, LinearChartFromMatrices) {
  Matrix<double> a(2), a_inv(2);
  a(0, 0) = 2.0; a(0, 1) = 1.0; a(1, 0) = 0.0; a(1, 1) = -1.0;
  a_inv = inverse(a);
  const ChartMap m = ChartMap::linear(a, a_inv);
  const std::vector<double> x{1.0, 3.0};
  const ChartJacobians j = chart_jacobians(m, x);
  EXPECT_DOUBLE_EQ(j.xhat[0], 5.0);
  EXPECT_DOUBLE_EQ(j.xhat[1], -3.0);
  EXPECT_LT(max_abs_diff(j.inverse, a_inv), 1e-15);
}

TEST(Chart, InconsistentOrSingularCharts) {
  const std::vector<double> x{0.5, 0.5};
  const ChartMap wrong_inverse =
      ChartMap::parse({"x1", "x2 + x1^2/2"}, {"x1", "x2"}, DomainBox::whole(2), DomainBox::whole(2));
  EXPECT_THROW(chart_jacobians(wrong_inverse, x), ChartMismatchError);
  const ChartMap singular = ChartMap::parse({"x1", "x1"}, {"x1", "x2"}, DomainBox::whole(2), DomainBox::whole(2));
  EXPECT_THROW(chart_jacobians(singular, x), SingularChartError);
  const ChartMap boxed =
      ChartMap::parse({"x1", "x2"}, {"x1", "x2"}, DomainBox::cube(2, 0.0, 0.4), DomainBox::whole(2));
  EXPECT_THROW(chart_jacobians(boxed, x), DomainError);
}

TEST(Chart, InversionAndComposition) {
  const ChartMap q = ChartMap::parse({"x1", "x2 + x1^2/2"}, {"x1", "x2 - x1^2/2"}, DomainBox::whole(2),
                                     DomainBox::whole(2));
  const ChartMap s = ChartMap::parse({"x1 + x2", "x2"}, {"x1 - x2", "x2"}, DomainBox::whole(2), DomainBox::whole(2));
  const std::vector<double> x{0.4, -0.3};
  const ChartJacobians fwd = chart_jacobians(q, x);
  const ChartJacobians back = chart_jacobians(q.inverted(), fwd.xhat);
  EXPECT_NEAR(back.xhat[0], x[0], 1e-15);
  EXPECT_NEAR(back.xhat[1], x[1], 1e-15);

  const ChartMap qs = q.then(s);
  const ChartJacobians c = chart_jacobians(qs, x);
  const ChartJacobians sj = chart_jacobians(s, fwd.xhat);
  EXPECT_NEAR(c.xhat[0], sj.xhat[0], 1e-15);
  EXPECT_NEAR(c.xhat[1], sj.xhat[1], 1e-15);
  // chain rule on the forward Jacobian
  for (std::size_t p = 0; p < 2; ++p)
    for (std::size_t i = 0; i < 2; ++i) {
      double s_ = 0.0;
      for (std::size_t k = 0; k < 2; ++k) s_ += sj.forward(p, k) * fwd.forward(k, i);
      EXPECT_NEAR(c.forward(p, i), s_, 1e-14);
    }
}
