#pragma once

#include "vmlab/modes.hpp"
#include "vmlab/quadrature.hpp"

namespace vmlab {

/// Liouville-Green basis of a scalar mode, already mapped back from the
/// canonical form y'' = r y:
///   u1 = r^{-1/4} exp(int_0^t (-p/2 + sqrt r)),  u2 = r^{-1/4} exp(int_0^t (-p/2 - sqrt r)).
struct LGBasis {
  double u1 = 0.0, u2 = 0.0;
  double du1 = 0.0, du2 = 0.0;
  double log_u1 = 0.0, log_u2 = 0.0;
};

/// -p/2 + sqrt(r) (branch +1) or -p/2 - sqrt(r) (branch -1). The slow branch
/// is evaluated as (p'/2 - lambda/eps) / (sqrt r + p/2) to avoid cancellation.
double lg_rate(const ScalarMode& mode, double t, int branch);

/// int_0^t lg_rate(s, branch) ds.
double lg_exponent(const ScalarMode& mode, double t, int branch, double tol = 1e-12);

/// Direct evaluation; inner integrals are computed from 0 on every call.
LGBasis lg_basis(const ScalarMode& mode, double t, double tol = 1e-12);

struct LGOptions {
  double t_max = 50.0;        // prefix caches cover [0, t_max]
  double node_spacing = 0.25;
  double tol = 1e-12;
  double phi_tail = 1e4;
};

/// Fitted approximation x(t) ~ A u1(t) + B u2(t) with the error envelopes
///   delta1_env(t) = exp(1/2 int_0^t |phi|) - 1,
///   delta2_env(t) = exp(1/2 int_t^inf |phi|) - 1.
/// Immutable; prefix integrals are cached per instance.
class LGApprox {
 public:
  LGApprox(ScalarMode mode, const LGOptions& options);

  const ScalarMode& mode() const { return mode_; }
  double A() const { return A_; }
  double B() const { return B_; }
  double phi_total() const { return phi_.value; }
  const PhiIntegral& phi_summary() const { return phi_; }

  LGBasis basis(double t) const;
  double delta1_env(double t) const;
  double delta2_env(double t) const;

 private:
  friend LGApprox fit_ab(const ScalarMode&, const LGOptions&);

  ScalarMode mode_;
  LGOptions options_;
  PrefixIntegral slow_, fast_, abs_phi_;
  PhiIntegral phi_;
  double A_ = 0.0, B_ = 0.0;
};

/// Solves [u1(0) u2(0); u1'(0) u2'(0)] (A, B) = (x0, v0).
LGApprox fit_ab(const ScalarMode& mode, const LGOptions& options = {});

struct LGValue {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// A u1 + B u2 with the interval |A| u1 delta1_env + |B| u2 delta2_env around it.
LGValue lg_solution(const LGApprox& approx, double t);

/// int_0^t [-lambda/(alpha + beta lambda) - lambda^2 eps/(alpha + beta lambda)^3] ds.
/// `advisory` is set when eps(t)/(beta lambda) > 0.1 somewhere on [0, t]
/// (sampled at t and 0), i.e. outside the small-eps regime.
double expanded_exponent(const ScalarMode& mode, double t, bool* advisory = nullptr, double tol = 1e-12);

}  // namespace vmlab
