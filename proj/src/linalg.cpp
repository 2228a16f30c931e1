#include "vmlab/linalg.hpp"

#include <cmath>
#include <string>

#include "vmlab/error.hpp"

namespace vmlab {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::invalid_spec: return "invalid-spec";
    case Errc::non_convex_region: return "non-convex-region";
    case Errc::unsupported_derivative: return "unsupported-derivative";
    case Errc::degenerate_schedule: return "degenerate-schedule";
    case Errc::singular_system: return "singular-system";
    case Errc::divergence: return "divergence";
    case Errc::invalid_modulus: return "invalid-modulus";
    case Errc::assumption_violated: return "assumption-violated";
    case Errc::degenerate_fit: return "degenerate-fit";
    case Errc::alignment: return "alignment";
    case Errc::degenerate_basis: return "degenerate-basis";
    case Errc::numeric: return "numeric";
    case Errc::underflow: return "underflow";
    case Errc::config: return "config";
    case Errc::io: return "io";
  }
  return "unknown";
}

namespace {

constexpr double kSingularRcond = 1e-15;
constexpr double kResidualTol = 1e-10;

[[noreturn]] void throw_singular(long step, const std::string& why) {
  std::string msg = "singular linear system";
  if (step >= 0) msg += " at step " + std::to_string(step);
  msg += ": " + why;
  throw Error(Errc::singular_system, msg, step >= 0 ? std::optional<long>(step) : std::nullopt);
}

template <class Factorization>
SpdSolve finish(const Factorization& fact, const Matrix& M, const Vector& b, long step) {
  SpdSolve out;
  out.x = fact.solve(b);
  Vector r = b - M * out.x;
  const double bnorm = b.norm();
  if (r.norm() > kResidualTol * bnorm) {
    out.x += fact.solve(r);
    r = b - M * out.x;
  }
  out.residual = r.norm();
  if (!out.x.allFinite() || out.residual > kResidualTol * bnorm) {
    throw_singular(step, "residual " + std::to_string(out.residual) + " above tolerance");
  }
  out.condition = 1.0 / fact.rcond();
  return out;
}

}  // namespace

SpdSolve solve_spd(const Matrix& M, const Vector& b, long step) {
  if (M.rows() != M.cols() || M.rows() != b.size()) {
    throw Error(Errc::invalid_argument, "solve_spd: dimension mismatch");
  }
  if (!M.allFinite() || !b.allFinite()) throw_singular(step, "non-finite entries");

  Eigen::LLT<Matrix> llt(M);
  if (llt.info() == Eigen::Success && llt.rcond() > kSingularRcond) {
    return finish(llt, M, b, step);
  }

  Eigen::LDLT<Matrix> ldlt(M);
  if (ldlt.info() != Eigen::Success || !(ldlt.rcond() > kSingularRcond)) {
    throw_singular(step, "factorization failed (rcond below 1e-15)");
  }
  SpdSolve out = finish(ldlt, M, b, step);
  out.used_fallback = true;
  return out;
}

double min_eigenvalue(const Matrix& S) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(S, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error(Errc::numeric, "eigenvalue computation failed");
  return es.eigenvalues()(0);
}

}  // namespace vmlab
