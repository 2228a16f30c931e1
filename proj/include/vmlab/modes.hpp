#pragma once

#include <vector>

#include "vmlab/linalg.hpp"
#include "vmlab/objective.hpp"
#include "vmlab/schedule.hpp"

namespace vmlab {

/// One eigen-direction of a quadratic: eps x'' + (alpha + beta lambda) x' + lambda x = 0.
struct ScalarMode {
  double lambda = 1.0;
  double beta = 1.0;
  Schedule eps = Schedule::constant(0.1);
  Schedule alpha = Schedule::zero();
  double x0 = 1.0;
  double v0 = 0.0;
};

/// Eigen-decomposition A^T A = Q diag(lambda) Q^T with per-mode initial data.
struct ModeDecomposition {
  Matrix Q;
  Vector lambdas;  // ascending
  std::vector<ScalarMode> modes;

  /// Q * values: maps per-mode coordinates back to the original space.
  Vector reconstruct(const Vector& mode_values) const { return Q * mode_values; }
};

ModeDecomposition eigenmodes(const QuadraticSpec& spec, double beta, const Schedule& eps, const Schedule& alpha,
                             const Vector& x0, const Vector& v0);

/// x0 e^{-t/beta}.
double closed_form_cn(double x0, double beta, double t);

/// int_0^t lambda / (alpha(s) + beta lambda) ds: closed forms for alpha = 0,
/// constant alpha and alpha0/(t+1); adaptive quadrature otherwise.
double lm_exponent_integral(const ScalarMode& mode, double t, double tol = 1e-12);

/// x0 exp(-int_0^t lambda / (alpha + beta lambda)).
double closed_form_lm(const ScalarMode& mode, double t, double tol = 1e-12);

/// p = (alpha + beta lambda)/eps, r = p^2/4 + p'/2 - lambda/eps and their
/// derivatives. Entries beyond the requested order are left at zero.
struct PR {
  double p = 0.0, dp = 0.0, ddp = 0.0, dddp = 0.0;
  double r = 0.0, dr = 0.0, ddr = 0.0;
};

/// order 0: p, p', r; order 1: adds p'', r'; order 2: adds p''', r''.
/// Throws Errc::assumption_violated when r <= 0 and
/// Errc::unsupported_derivative for table schedules.
PR p_r_eval(const ScalarMode& mode, double t, int order = 2);

/// (4 r r'' - 5 r'^2) / (16 r^{5/2}).
double phi(const ScalarMode& mode, double t);

struct PhiIntegral {
  double value = 0.0;       // estimate of int_0^inf |phi|
  double quadrature = 0.0;  // int_0^T_tail |phi|
  double tail = 0.0;        // extrapolated int_T_tail^inf |phi|
  double decay_ratio = 0.0; // last decade contribution / previous one
  bool convergent = true;
};

/// Adaptive quadrature over the decades [0,1], [1,10], ..., up to T_tail,
/// plus a geometric tail extrapolated from the last two decades.
/// `convergent` is false when the decade contributions do not shrink.
PhiIntegral phi_integral(const ScalarMode& mode, double t_tail = 1e4, double tol = 1e-10);

}  // namespace vmlab
