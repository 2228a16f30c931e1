#include <gtest/gtest.h>

#include <cmath>

#include "../support/oracles.hpp"
#include "vmlab/assumptions.hpp"
#include "vmlab/error.hpp"
#include "vmlab/quadrature.hpp"
#include "vmlab/schedule.hpp"

using namespace vmlab;

TEST(Schedule, PowerValuesAndDerivatives) {
  const Schedule s = Schedule::power(1.0, 1.0);
  EXPECT_DOUBLE_EQ(s.eval(0.0, 1), -1.0);
  EXPECT_DOUBLE_EQ(Schedule::power(0.1, 2.0)(0.0), 0.1);
  EXPECT_DOUBLE_EQ(Schedule::constant(0.5).eval(3.7, 1), 0.0);
}

TEST(Schedule, DerivativesMatchFiniteDifferences) {
  for (const Schedule& s : {Schedule::power(0.3, 1.0), Schedule::power(2.0, 2.5), Schedule::power(1.0, 3.0)}) {
    for (double t : {0.0, 0.4, 3.0, 17.0}) {
      for (int k = 1; k <= 3; ++k) {
        const double fd = oracle::central_diff4([&](double u) { return s.eval(u, k - 1); }, t + 0.01, 1e-3);
        EXPECT_NEAR(s.eval(t + 0.01, k), fd, 1e-7 * (1.0 + std::abs(fd))) << s.label() << " k=" << k;
      }
    }
  }
}

TEST(Schedule, Integrability) {
  EXPECT_EQ(Schedule::power(1.0, 1.0).integrability(), Integrability::non_integrable);
  EXPECT_EQ(Schedule::power(1.0, 0.5).integrability(), Integrability::non_integrable);
  EXPECT_EQ(Schedule::power(1.0, 2.0).integrability(), Integrability::integrable);
  EXPECT_EQ(Schedule::constant(0.2).integrability(), Integrability::non_integrable);
  EXPECT_EQ(Schedule::zero().integrability(), Integrability::integrable);
  EXPECT_EQ(Schedule::table({0, 1}, {1, 0.5}).integrability(), Integrability::unknown);
}

TEST(Schedule, TableInterpolatesAndHolds) {
  const Schedule s = Schedule::table({0.0, 1.0, 3.0}, {1.0, 0.5, 0.1});
  EXPECT_DOUBLE_EQ(s(0.5), 0.75);
  EXPECT_DOUBLE_EQ(s(2.0), 0.3);
  EXPECT_DOUBLE_EQ(s(10.0), 0.1);
  EXPECT_FALSE(s.has_derivatives());
  EXPECT_DOUBLE_EQ(s.slope(2.0), -0.2);
  try {
    s.eval(0.5, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::unsupported_derivative);
  }
}

TEST(Schedule, InvalidConstruction) {
  EXPECT_THROW(Schedule::power(1.0, -1.0), Error);
  EXPECT_THROW(Schedule::table({0.0, 0.0}, {1.0, 1.0}), Error);
  EXPECT_THROW(Schedule::table({0.0, 1.0}, {1.0}), Error);
}

TEST(Schedule, Labels) {
  EXPECT_EQ(Schedule::power(1.0, 2.0).label(), "1/(t+1)^2");
  EXPECT_EQ(Schedule::zero().label(), "0");
}

TEST(Structure, AcceptsMonotoneSchedules) {
  const auto grid = check_grid(0.1, 20.0);
  EXPECT_TRUE(validate_structure(Schedule::power(1.0, 1.0), true, grid).empty());
  EXPECT_TRUE(validate_structure(Schedule::zero(), false, grid).empty());
}

TEST(Structure, RejectsIncreasingOrZeroEps) {
  const auto grid = check_grid(0.1, 20.0);
  EXPECT_FALSE(validate_structure(Schedule::table({0, 1, 2}, {0.1, 0.2, 0.3}), true, grid).empty());
  EXPECT_FALSE(validate_structure(Schedule::zero(), true, grid).empty());
}

TEST(CheckGrid, Shape) {
  const auto g = check_grid(0.1, 5.0);
  EXPECT_EQ(g.front(), 0.0);
  EXPECT_EQ(g.back(), 5.0);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_LT(g[i - 1], g[i]);
}

class Assumptions : public ::testing::Test {
 protected:
  std::vector<double> grid = check_grid(0.1, 50.0);
};

TEST_F(Assumptions, A31PowerEps) {
  const auto r = check_a31(Schedule::power(1.0, 1.0), Schedule::zero(), grid);
  EXPECT_TRUE(r.holds);
  EXPECT_NEAR(r.c1, 1.0, 1e-12);
  EXPECT_NEAR(r.c2, 0.0, 1e-12);
}

TEST_F(Assumptions, A31Constants) {
  const auto r = check_a31(Schedule::constant(0.4), Schedule::constant(0.4), grid);
  EXPECT_TRUE(r.holds);
  EXPECT_NEAR(r.c1, 0.0, 1e-12);
  EXPECT_NEAR(r.c2, 1.0, 1e-12);
}

TEST_F(Assumptions, A31GaussianTableFails) {
  std::vector<double> t, v;
  for (int i = 0; i <= 400; ++i) {
    t.push_back(0.01 * i);
    v.push_back(std::exp(-t.back() * t.back()));
  }
  EXPECT_FALSE(check_a31(Schedule::table(t, v), Schedule::zero(), check_grid(0.01, 4.0)).holds);
}

TEST_F(Assumptions, A31CertifiedRegionWithTargets) {
  ConstantTargets targets;
  targets.c1 = 0.5;
  const auto r = check_a31(Schedule::power(1.0, 1.0), Schedule::zero(), grid, targets);
  // 1/(t+1) <= 0.5 from t = 1 on.
  EXPECT_GE(r.t0, 1.0 - 1e-12);
}

TEST_F(Assumptions, A35) {
  EXPECT_NEAR(check_a35(Schedule::power(1.0, 1.0), Schedule::power(0.3, 2.0), grid).c2, 2.0, 1e-12);
  EXPECT_NEAR(check_a35(Schedule::power(1.0, 1.0), Schedule::constant(0.3), grid).c2, 0.0, 1e-12);
  EXPECT_NEAR(check_a35(Schedule::power(0.2, 1.0), Schedule::zero(), grid).c1, 1.0, 1e-12);
}

TEST_F(Assumptions, A42) {
  const auto ok = check_a42(Schedule::power(0.1, 1.0), Schedule::zero(), 1.0, 1.0, grid);
  EXPECT_TRUE(ok.holds);
  EXPECT_NEAR(ok.bound, 0.25, 1e-12);
  EXPECT_FALSE(check_a42(Schedule::power(0.3, 1.0), Schedule::zero(), 1.0, 1.0, grid).holds);
  EXPECT_NEAR(check_a42(Schedule::power(0.1, 1.0), Schedule::zero(), 4.0, 1.0, grid).bound, 1.0, 1e-12);
}

TEST_F(Assumptions, A42AlphaSlopeTightensBound) {
  // (beta lambda)^2 / (2|alpha'(0)| + 4 lambda) with alpha = 1/(t+1): 1 / (2 + 4).
  const auto r = check_a42(Schedule::power(0.1, 1.0), Schedule::power(1.0, 1.0), 1.0, 1.0, grid);
  EXPECT_NEAR(r.bound, 1.0 / 6.0, 1e-12);
  EXPECT_TRUE(r.holds);
}

TEST_F(Assumptions, A46) {
  EXPECT_TRUE(check_a46(Schedule::power(1.0, 1.0), Schedule::constant(1.0)).holds);
  EXPECT_FALSE(check_a46(Schedule::constant(0.5), Schedule::zero()).holds);
  EXPECT_TRUE(check_a46(Schedule::power(1.0, 2.0), Schedule::power(1.0, 1.0)).holds);
  const auto table = check_a46(Schedule::table({0, 1}, {1, 0.5}), Schedule::zero());
  EXPECT_FALSE(table.determined);
}

TEST(Quadrature, AdaptiveSimpsonPolynomialAndExp) {
  EXPECT_NEAR(adaptive_simpson([](double x) { return x * x * x; }, 0.0, 2.0, 1e-12), 4.0, 1e-12);
  EXPECT_NEAR(adaptive_simpson([](double x) { return std::exp(-x); }, 0.0, 5.0, 1e-12), 1.0 - std::exp(-5.0), 1e-11);
}

TEST(Quadrature, AgreesWithCompositeSimpson) {
  auto f = [](double x) { return std::sqrt(0.3 / ((x + 1) * (x + 1))) * std::cos(x); };
  EXPECT_NEAR(adaptive_simpson(f, 0.0, 7.0, 1e-12), oracle::simpson(f, 0.0, 7.0, 20000), 1e-10);
}

TEST(Quadrature, WeightedExpIntegral) {
  const auto rule = QuadratureRule::adaptive();
  EXPECT_EQ(weighted_exp_integral([](double) { return 0.0; }, 3.0, 1.0, rule), 0.0);
  EXPECT_NEAR(weighted_exp_integral([](double) { return 1.0; }, 1.0, 1.0, rule), 1.0 - std::exp(-1.0), 1e-12);
  const double e0 = 0.04, beta = 2.0, t = 3.0;
  EXPECT_NEAR(weighted_exp_integral([&](double) { return std::sqrt(e0); }, t, beta, rule),
              std::sqrt(e0) * beta * (1.0 - std::exp(-t / beta)), 1e-12);
}

TEST(Quadrature, WeightedSeriesMatchesPointwise) {
  auto g = [](double s) { return 1.0 / std::sqrt(s + 1.0); };
  std::vector<double> times;
  for (int k = 0; k <= 40; ++k) times.push_back(0.25 * k);
  const auto series = weighted_exp_integral_series(g, times, 1.5, QuadratureRule::adaptive());
  for (std::size_t k = 0; k < times.size(); ++k)
    EXPECT_NEAR(series[k], weighted_exp_integral(g, times[k], 1.5, QuadratureRule::adaptive()), 1e-11);
}

TEST(Quadrature, TrapezoidRuleIsSecondOrder) {
  auto f = [](double x) { return std::exp(x); };
  const double exact = std::exp(1.0) - 1.0;
  const double e1 = std::abs(trapezoid(f, 0.0, 1.0, 0.1) - exact);
  const double e2 = std::abs(trapezoid(f, 0.0, 1.0, 0.05) - exact);
  EXPECT_NEAR(e1 / e2, 4.0, 0.05);
}

TEST(Quadrature, PrefixIntegral) {
  const PrefixIntegral F([](double s) { return std::cos(s); }, 10.0, 0.5, 1e-12);
  for (double t : {0.0, 0.3, 2.75, 9.99, 12.0}) EXPECT_NEAR(F(t), std::sin(t), 1e-11);
}
