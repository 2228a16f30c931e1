#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "../support/oracles.hpp"
#include "vmlab/error.hpp"
#include "vmlab/linalg.hpp"
#include "vmlab/objective.hpp"

using namespace vmlab;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) x(i++) = d;
  return x;
}

Matrix diag(std::initializer_list<double> v) { return vec(v).asDiagonal(); }

std::vector<Objective> all_families(const QuadraticSpec& spec) {
  return {make_quadratic(spec), make_gauss_plus_quad(spec), make_logsumexp_plus_quad(spec),
          make_poly50_plus_quad(spec)};
}

}  // namespace

TEST(Quadratic, IdentityMatrix) {
  const Objective f = make_quadratic(QuadraticSpec::from_matrix(Matrix::Identity(2, 2)));
  EXPECT_DOUBLE_EQ(f.eval(vec({1, 1})), 1.0);
  EXPECT_TRUE(f.grad(vec({1, 1})).isApprox(vec({1, 1})));
  EXPECT_TRUE(f.is_quadratic);
}

TEST(Quadratic, ScalarSpectrum) {
  const Objective f = make_quadratic(QuadraticSpec::from_spectrum({4.0}));
  EXPECT_DOUBLE_EQ(f.eval(vec({2})), 8.0);
  EXPECT_DOUBLE_EQ(f.grad(vec({2}))(0), 8.0);
  EXPECT_DOUBLE_EQ(f.hess(vec({2}))(0, 0), 4.0);
}

TEST(Quadratic, ZeroIsMinimizer) {
  const Objective f = make_quadratic(QuadraticSpec::log_spaced(5, 100.0));
  EXPECT_EQ(f.eval(Vector::Zero(5)), 0.0);
  EXPECT_EQ(f.grad(Vector::Zero(5)).norm(), 0.0);
  ASSERT_TRUE(f.optimal_value().has_value());
  EXPECT_EQ(*f.optimal_value(), 0.0);
}

TEST(Quadratic, GramOfMatrix) {
  Matrix A(2, 2);
  A << 2, 1, 1, 2;
  const QuadraticSpec s = QuadraticSpec::from_matrix(A);
  Eigen::SelfAdjointEigenSolver<Matrix> es(s.gram());
  EXPECT_NEAR(es.eigenvalues()(0), 1.0, 1e-12);
  EXPECT_NEAR(es.eigenvalues()(1), 9.0, 1e-12);
  EXPECT_NEAR(s.lambda_min(), 1.0, 1e-12);
}

TEST(QuadraticSpec, LogSpacedEndpoints) {
  const QuadraticSpec s = QuadraticSpec::log_spaced(10, 100.0, 10.0);
  ASSERT_TRUE(s.spectrum().has_value());
  EXPECT_NEAR(s.spectrum()->front(), 0.1, 1e-14);
  EXPECT_NEAR(s.spectrum()->back(), 10.0, 1e-12);
  for (std::size_t i = 1; i < s.spectrum()->size(); ++i)
    EXPECT_NEAR((*s.spectrum())[i] / (*s.spectrum())[i - 1], std::pow(100.0, 1.0 / 9.0), 1e-12);
}

TEST(QuadraticSpec, RejectsNonPositiveSpectrum) {
  EXPECT_THROW(QuadraticSpec::from_spectrum({1.0, 0.0}), Error);
  EXPECT_THROW(QuadraticSpec::from_spectrum({-1.0}), Error);
  EXPECT_THROW(QuadraticSpec::from_matrix(Matrix::Zero(2, 2)), Error);
}

TEST(GaussQuad, Origin) {
  const Objective f = make_gauss_plus_quad(QuadraticSpec::from_matrix(2.0 * Matrix::Identity(3, 3)));
  EXPECT_DOUBLE_EQ(f.eval(Vector::Zero(3)), 1.0);
  EXPECT_EQ(f.grad(Vector::Zero(3)).norm(), 0.0);
  EXPECT_TRUE(f.hess(Vector::Zero(3)).isApprox(2.0 * Matrix::Identity(3, 3), 1e-12));
  const Matrix fd = oracle::fd_jacobian(f.grad, Vector::Zero(3));
  EXPECT_TRUE(f.hess(Vector::Zero(3)).isApprox(fd, 1e-6));
}

TEST(GaussQuad, HandValue) {
  const Objective f = make_gauss_plus_quad(QuadraticSpec::from_matrix(2.0 * Matrix::Identity(1, 1)));
  EXPECT_NEAR(f.eval(vec({1})), std::exp(-1.0) + 2.0, 1e-15);
}

TEST(LogSumExpQuad, Symmetry) {
  const Objective f1 = make_logsumexp_plus_quad(QuadraticSpec::from_matrix(Matrix::Identity(1, 1)));
  EXPECT_NEAR(f1.eval(vec({0})), std::log(2.0), 1e-15);
  const Objective f4 = make_logsumexp_plus_quad(QuadraticSpec::log_spaced(4, 10.0));
  EXPECT_LE(f4.grad(Vector::Zero(4)).norm(), 1e-15);
}

TEST(LogSumExpQuad, FiniteDifferenceAtUnitVector) {
  const Objective f = make_logsumexp_plus_quad(QuadraticSpec::from_matrix(Matrix::Identity(2, 2)));
  const Vector x = vec({1, 0});
  EXPECT_TRUE(f.grad(x).isApprox(oracle::fd_gradient(f.eval, x), 1e-8));
}

TEST(LogSumExpQuad, StableForLargeArguments) {
  const Objective f = make_logsumexp_plus_quad(QuadraticSpec::from_spectrum({1.0, 1.0}));
  const Vector x = vec({800, -800});
  EXPECT_TRUE(std::isfinite(f.eval(x)));
  EXPECT_TRUE(f.grad(x).allFinite());
  EXPECT_TRUE(f.hess(x).allFinite());
}

TEST(Poly50Quad, HandValues) {
  const Objective f = make_poly50_plus_quad(QuadraticSpec::from_matrix(Matrix::Identity(1, 1)));
  EXPECT_EQ(f.eval(vec({0})), 0.0);
  EXPECT_EQ(f.grad(vec({0}))(0), 0.0);
  EXPECT_DOUBLE_EQ(f.eval(vec({1})), 1.5);
  EXPECT_DOUBLE_EQ(f.grad(vec({1}))(0), 51.0);
}

TEST(Poly50Quad, PowerSumBound) {
  const Objective f = make_poly50_plus_quad(QuadraticSpec::from_spectrum({1e-6, 1e-6, 1e-6}));
  const Vector x = vec({1.0, -0.7, 0.99});
  EXPECT_LE(f.eval(x) - 0.5e-6 * x.squaredNorm(), 3.0);
}

TEST(ObjectiveFamilies, DerivativesMatchFiniteDifferences) {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  Matrix A(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) A(i, j) = u(gen);
  A.diagonal().array() += 2.5;
  for (const Objective& f : all_families(QuadraticSpec::from_matrix(A))) {
    for (int trial = 0; trial < 5; ++trial) {
      Vector x(4);
      for (int i = 0; i < 4; ++i) x(i) = u(gen);
      const Vector g = f.grad(x);
      const Matrix H = f.hess(x);
      EXPECT_LE((g - oracle::fd_gradient(f.eval, x, 1e-5)).norm(), 1e-6 * (1.0 + g.norm())) << f.name;
      EXPECT_LE((H - oracle::fd_jacobian(f.grad, x, 1e-5)).norm(), 1e-5 * (1.0 + H.norm())) << f.name;
      EXPECT_LE((H - H.transpose()).norm(), 1e-12 * (1.0 + H.norm())) << f.name;
    }
  }
}

TEST(ObjectiveFamilies, MinimizerIsStationary) {
  for (const Objective& f : all_families(QuadraticSpec::log_spaced(6, 10.0, 25.0))) {
    if (!f.minimizer) continue;
    const double scale = std::max(1.0, f.hess(*f.minimizer).norm());
    EXPECT_LE(f.grad(*f.minimizer).norm(), 1e-10 * scale) << f.name;
  }
}

TEST(EstimateMu, QuadraticIsExact) {
  const Objective f = make_quadratic(QuadraticSpec::from_spectrum({1.0, 9.0}));
  const std::vector<Vector> samples{vec({3, -1})};
  EXPECT_DOUBLE_EQ(estimate_mu(f, samples), 1.0);
  const std::vector<Vector> at_min{Vector::Zero(2)};
  EXPECT_DOUBLE_EQ(estimate_mu(f, at_min), 1.0);
}

TEST(EstimateMu, GaussQuadNearOrigin) {
  const Objective f = make_gauss_plus_quad(QuadraticSpec::from_matrix(2.0 * Matrix::Identity(2, 2)));
  const std::vector<Vector> samples{vec({0.01, 0.0}), vec({0.0, -0.02}), Vector::Zero(2)};
  const double mu = estimate_mu(f, samples);
  EXPECT_GE(mu, 2.0 - 1e-12);
  double ref = 1e300;
  for (const auto& x : samples) ref = std::min(ref, min_eigenvalue(f.hess(x)));
  EXPECT_NEAR(mu, ref, 1e-12);
}

TEST(EstimateMu, IndefiniteSamples) {
  const Objective f = make_gauss_plus_quad(QuadraticSpec::from_spectrum({0.5, 0.5}));
  const std::vector<Vector> bad{Vector::Zero(2)};
  try {
    estimate_mu(f, bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::non_convex_region);
  }
  // One convex sample far out, one indefinite at the origin: the minimum is floored.
  const std::vector<Vector> mixed{Vector::Zero(2), Vector::Constant(2, 5.0)};
  EXPECT_EQ(estimate_mu(f, mixed), kMuFloor);
  EXPECT_THROW(estimate_mu(f, std::vector<Vector>{}), Error);
}

TEST(Linalg, SolveScaledIdentity) {
  const SpdSolve s = solve_spd(2.0 * Matrix::Identity(2, 2), vec({4, 6}));
  EXPECT_TRUE(s.x.isApprox(vec({2, 3})));
}

TEST(Linalg, SolveTwoByTwo) {
  Matrix M(2, 2);
  M << 4, 1, 1, 3;
  const SpdSolve s = solve_spd(M, vec({1, 2}));
  // Direct 2x2 inverse: (1/11) [[3,-1],[-1,4]] (1,2) = (1/11, 7/11).
  EXPECT_NEAR(s.x(0), 1.0 / 11.0, 1e-15);
  EXPECT_NEAR(s.x(1), 7.0 / 11.0, 1e-15);
  EXPECT_LE(s.residual, 1e-14);
}

TEST(Linalg, IndefiniteFallsBack) {
  Matrix M(2, 2);
  M << 1, 0, 0, -2;
  const SpdSolve s = solve_spd(M, vec({1, 1}));
  EXPECT_TRUE(s.used_fallback);
  EXPECT_NEAR(s.x(1), -0.5, 1e-15);
}

TEST(Linalg, SingularThrows) {
  try {
    solve_spd(Matrix::Zero(2, 2), vec({1, 1}), 7);
    FAIL() << "expected singular-system error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::singular_system);
    EXPECT_EQ(e.index(), 7);
  }
}
