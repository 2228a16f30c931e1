#pragma once

#include <Eigen/Dense>

namespace vmlab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct SpdSolve {
  Vector x;
  double condition = 1.0;  // 1 / reciprocal-condition estimate of the factorization
  double residual = 0.0;   // ||M x - b||
  bool used_fallback = false;
};

/// Solves M z = b for symmetric M. Tries Cholesky first and falls back to a
/// pivoted LDL^T factorization when M is not numerically positive definite.
/// Guarantees ||M z - b|| <= 1e-10 ||b|| (one refinement sweep is applied if
/// needed) or throws Errc::singular_system tagged with `step`.
SpdSolve solve_spd(const Matrix& M, const Vector& b, long step = -1);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Matrix& S);

}  // namespace vmlab
