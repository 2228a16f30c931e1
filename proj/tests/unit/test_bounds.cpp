#include <gtest/gtest.h>

#include <cmath>

#include "vmlab/assumptions.hpp"
#include "vmlab/bounds.hpp"
#include "vmlab/error.hpp"
#include "vmlab/integrator.hpp"
#include "vmlab/objective.hpp"

using namespace vmlab;

namespace {

std::vector<double> uniform_times(double h, double T) {
  std::vector<double> t;
  for (long k = 0; k <= std::lround(T / h); ++k) t.push_back(h * static_cast<double>(k));
  return t;
}

}  // namespace

TEST(ConstantsT32, HandValues) {
  const T32Constants k = constants_t32(0.5, 1.0, 1.0, 0.0, 0.0);
  EXPECT_DOUBLE_EQ(k.C0, 1.0);
  EXPECT_DOUBLE_EQ(k.C1, 1.0);
  EXPECT_DOUBLE_EQ(k.C2, 1.0);
  const T32Constants z = constants_t32(0.0, 1.0, 1.0, 0.4, 0.2);
  EXPECT_EQ(z.C1, 0.0);
  EXPECT_EQ(z.C2, 0.0);
}

TEST(ConstantsT32, HomogeneousInMu) {
  const T32Constants a = constants_t32(2.0, 0.3, 1.5, 0.5, 0.7);
  const T32Constants b = constants_t32(2.0, 0.6, 1.5, 0.5, 0.7);
  EXPECT_DOUBLE_EQ(b.C0, a.C0 / 2);
  EXPECT_DOUBLE_EQ(b.C1, a.C1 / 2);
  EXPECT_DOUBLE_EQ(b.C2, a.C2 / 2);
}

TEST(EnvelopeT32, InitialValueAndZeroLimit) {
  const Schedule eps = Schedule::power(0.2, 1.0);
  const T32Constants k = constants_t32(0.5, 1.0, 1.0, 1.0, 0.0);
  BoundInputs in{0.5, 1.0, 1.0, 1.0, 0.0, 0.2, 3.0};
  const std::vector<double> t0{0.0};
  const auto env = envelope_t32(eps, k, in, t0);
  EXPECT_NEAR(env.values[0], k.C0 * 0.2 * 3.0 + k.C1 * std::sqrt(0.2), 1e-14);

  const T32Constants kz = constants_t32(0.0, 1.0, 1.0, 0.0, 0.0);
  BoundInputs inz{0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0};
  const auto times = uniform_times(0.5, 10.0);
  for (double v : envelope_t32(Schedule::zero(), kz, inz, times).values) EXPECT_EQ(v, 0.0);
}

TEST(EnvelopeT32, ConstantEpsLimit) {
  const double e0 = 0.09;
  const T32Constants k = constants_t32(0.5, 1.0, 1.0, 0.0, 0.0);
  BoundInputs in{0.5, 1.0, 1.0, 0.0, 0.0, e0, 0.0};
  const std::vector<double> t{60.0};
  const auto env = envelope_t32(Schedule::constant(e0), k, in, t);
  EXPECT_NEAR(env.values[0], (k.C1 + k.C2) * std::sqrt(e0), 1e-10);
}

TEST(EnvelopeT32, AdvisoryWhenAssumptionFails) {
  std::vector<double> tt, vv;
  for (int i = 0; i <= 100; ++i) {
    tt.push_back(0.04 * i);
    vv.push_back(std::exp(-tt.back() * tt.back()));
  }
  const Schedule eps = Schedule::table(tt, vv);
  const auto a31 = check_a31(eps, Schedule::zero(), check_grid(0.04, 4.0));
  ASSERT_FALSE(a31.holds);
  const T32Constants k = constants_t32(0.5, 1.0, 1.0, 1.0, 0.0);
  BoundInputs in{0.5, 1.0, 1.0, 1.0, 0.0, 1.0, 0.0};
  const auto env = envelope_t32(eps, k, in, tt, QuadratureRule::grid(0.01), a31);
  EXPECT_TRUE(env.advisory);
  EXPECT_FALSE(env.warnings.empty());
}

TEST(EnvelopeC35, ConstantsAndPole) {
  const T32Constants k = constants_t32(0.5, 1.0, 1.0, 0.0, 0.0);
  BoundInputs in{0.5, 1.0, 1.0, 0.0, 0.0, 0.1, 0.0};
  const std::vector<double> t{0.0};
  const auto env = envelope_c35(Schedule::constant(0.1), k, in, t);
  EXPECT_NEAR(env.constants.at("C3"), k.C1 + k.C2, 1e-14);

  BoundInputs near_pole{0.5, 1.0, 1.0, 1.999999, 0.0, 0.1, 0.0};
  const T32Constants kp = constants_t32(0.5, 1.0, 1.0, 1.999999, 0.0);
  const auto big = envelope_c35(Schedule::power(0.1, 1.0), kp, near_pole, t);
  EXPECT_GT(big.constants.at("C3"), 1e5);
  EXPECT_TRUE(std::isfinite(big.values[0]));
  EXPECT_FALSE(big.warnings.empty());

  BoundInputs beyond{0.5, 1.0, 1.0, 2.0, 0.0, 0.1, 0.0};
  try {
    envelope_c35(Schedule::power(0.1, 1.0), constants_t32(0.5, 1.0, 1.0, 2.0, 0.0), beyond, t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::assumption_violated);
  }
}

TEST(EnvelopeC35, DominatesT32) {
  const auto times = uniform_times(0.1, 30.0);
  for (double beta : {0.5, 1.0, 2.0}) {
    for (double a : {0.5, 1.0, 2.0}) {
      const Schedule eps = Schedule::power(0.7, a);
      const auto a31 = check_a31(eps, Schedule::power(0.2, 2.0), check_grid(0.1, 30.0));
      if (!(a31.c1 < 2.0 / beta)) continue;
      const T32Constants k = constants_t32(1.3, 0.4, beta, a31.c1, a31.c2);
      BoundInputs in{1.3, 0.4, beta, a31.c1, a31.c2, 0.7, 0.5};
      const auto t32 = envelope_t32(eps, k, in, times);
      const auto c35 = envelope_c35(eps, k, in, times);
      for (std::size_t i = 0; i < times.size(); ++i) EXPECT_GE(c35.values[i], t32.values[i] * (1 - 1e-12));
    }
  }
}

TEST(EnvelopeT36, Shape) {
  const auto times = uniform_times(0.5, 10.0);
  const auto s = envelope_t36_shape(Schedule::constant(0.04), Schedule::constant(0.3), 1.0, times);
  EXPECT_NEAR(s.values[0], 1.0 + 0.2 + 0.3, 1e-14);
  // eps = 0, alpha const: e^{-t} + a + a(1 - e^{-t}) -> a (1 + beta).
  const std::vector<double> far{80.0};
  EXPECT_NEAR(envelope_t36_shape(Schedule::zero(), Schedule::constant(0.3), 2.0, far).values[0], 0.3 * 3.0, 1e-10);
}

TEST(EnvelopeT36, AlphaZeroMatchesT32Shape) {
  const auto times = uniform_times(0.5, 10.0);
  const Schedule eps = Schedule::power(0.3, 1.0);
  const auto s = envelope_t36_shape(eps, Schedule::zero(), 1.0, times);
  T32Constants ones{1.0, 1.0, 1.0};
  BoundInputs in{0.5, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0};  // C0 eps0 ||v0|| = 1
  const auto t32 = envelope_t32(eps, ones, in, times);
  for (std::size_t i = 0; i < times.size(); ++i) EXPECT_NEAR(s.values[i], t32.values[i], 1e-12);
}

TEST(FitConstant, Basics) {
  const std::vector<double> shape{1.0, 0.5, 0.25};
  EXPECT_EQ(fit_constant(std::vector<double>{0, 0, 0}, shape), 0.0);
  EXPECT_DOUBLE_EQ(fit_constant(std::vector<double>{2.0, 1.0, 0.5}, shape), 2.0);
  EXPECT_THROW(fit_constant(std::vector<double>{1.0}, shape), Error);
}

TEST(DistanceSeries, Basics) {
  const Objective f = make_quadratic(QuadraticSpec::from_spectrum({1.0, 2.0}));
  SolverConfig c;
  c.gamma = 0.1;
  c.horizon = 1.0;
  c.x0 = Vector::Ones(2);
  c.scheme = Scheme::cn;
  const Trajectory a = integrate(f, Schedule::zero(), Schedule::zero(), c);
  for (double d : distance_series(a, a)) EXPECT_EQ(d, 0.0);
  std::vector<Vector> shifted = a.states;
  Vector off(2);
  off << 3.0, 4.0;
  for (auto& v : shifted) v += off;
  for (double d : distance_series(a.states, shifted)) EXPECT_NEAR(d, 5.0, 1e-14);
  std::vector<Vector> shorter(a.states.begin(), a.states.end() - 1);
  try {
    distance_series(a.states, shorter);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::alignment);
  }
}

TEST(DistanceSeries, CnSchemeVsClosedFormIsFirstOrder) {
  const Objective f = make_quadratic(QuadraticSpec::from_spectrum({1.0, 5.0}));
  double prev = 0.0;
  for (double gamma : {0.1, 0.05, 0.025}) {
    SolverConfig c;
    c.gamma = gamma;
    c.horizon = 10.0;
    c.x0 = Vector::Ones(2);
    c.scheme = Scheme::cn;
    const Trajectory tr = integrate(f, Schedule::zero(), Schedule::zero(), c);
    std::vector<Vector> exact;
    for (double t : tr.times) exact.push_back(Vector::Ones(2) * std::exp(-t));
    double worst = 0.0;
    for (double d : distance_series(tr.states, exact)) worst = std::max(worst, d);
    if (prev > 0.0) EXPECT_NEAR(prev / worst, 2.0, 0.15);
    prev = worst;
  }
}
