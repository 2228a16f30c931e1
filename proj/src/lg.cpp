#include "vmlab/lg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vmlab/error.hpp"

namespace vmlab {

double lg_rate(const ScalarMode& mode, double t, int branch) {
  const PR v = p_r_eval(mode, t, 0);
  const double sr = std::sqrt(v.r);
  if (branch > 0) return (v.dp / 2.0 - mode.lambda / mode.eps(t)) / (sr + v.p / 2.0);
  return -v.p / 2.0 - sr;
}

double lg_exponent(const ScalarMode& mode, double t, int branch, double tol) {
  return adaptive_simpson([&](double s) { return lg_rate(mode, s, branch); }, 0.0, t, tol);
}

namespace {

LGBasis assemble(const ScalarMode& mode, double t, double slow_integral, double fast_integral) {
  const PR v = p_r_eval(mode, t, 1);
  const double sr = std::sqrt(v.r);
  const double log_amp = -0.25 * std::log(v.r);
  const double amp_rate = -v.dr / (4.0 * v.r);
  LGBasis b;
  b.log_u1 = log_amp + slow_integral;
  b.log_u2 = log_amp + fast_integral;
  b.u1 = std::exp(b.log_u1);
  b.u2 = std::exp(b.log_u2);
  b.du1 = b.u1 * (amp_rate + (v.dp / 2.0 - mode.lambda / mode.eps(t)) / (sr + v.p / 2.0));
  b.du2 = b.u2 * (amp_rate - v.p / 2.0 - sr);
  return b;
}

}  // namespace

LGBasis lg_basis(const ScalarMode& mode, double t, double tol) {
  if (!(t >= 0.0)) throw Error(Errc::invalid_argument, "lg_basis needs t >= 0");
  return assemble(mode, t, lg_exponent(mode, t, +1, tol), lg_exponent(mode, t, -1, tol));
}

LGApprox::LGApprox(ScalarMode mode, const LGOptions& options) : mode_(std::move(mode)), options_(options) {
  const ScalarMode& m = mode_;
  slow_ = PrefixIntegral([m](double s) { return lg_rate(m, s, +1); }, options.t_max, options.node_spacing,
                         options.tol);
  fast_ = PrefixIntegral([m](double s) { return lg_rate(m, s, -1); }, options.t_max, options.node_spacing,
                         options.tol);
  abs_phi_ = PrefixIntegral([m](double s) { return std::abs(phi(m, s)); }, options.t_max, options.node_spacing,
                            options.tol);
  phi_ = phi_integral(m, std::max(options.phi_tail, 10.0), 1e-10);
}

LGBasis LGApprox::basis(double t) const {
  if (!(t >= 0.0)) throw Error(Errc::invalid_argument, "LGApprox::basis needs t >= 0");
  return assemble(mode_, t, slow_(t), fast_(t));
}

double LGApprox::delta1_env(double t) const { return std::expm1(0.5 * abs_phi_(t)); }

double LGApprox::delta2_env(double t) const {
  if (!phi_.convergent) return std::numeric_limits<double>::infinity();
  return std::expm1(0.5 * std::max(0.0, phi_.value - abs_phi_(t)));
}

LGApprox fit_ab(const ScalarMode& mode, const LGOptions& options) {
  LGApprox approx(mode, options);
  const LGBasis b0 = approx.basis(0.0);
  const double det = b0.u1 * b0.du2 - b0.u2 * b0.du1;
  const double scale = std::max({std::abs(b0.u1 * b0.du2), std::abs(b0.u2 * b0.du1), 1e-300});
  if (!std::isfinite(det) || std::abs(det) <= 1e-14 * scale) {
    throw Error(Errc::degenerate_basis, "fit_ab: LG basis is degenerate at t = 0");
  }
  approx.A_ = (mode.x0 * b0.du2 - b0.u2 * mode.v0) / det;
  approx.B_ = (b0.u1 * mode.v0 - b0.du1 * mode.x0) / det;
  return approx;
}

LGValue lg_solution(const LGApprox& approx, double t) {
  const LGBasis b = approx.basis(t);
  const double first = approx.A() * b.u1;
  const double second = approx.B() == 0.0 ? 0.0 : approx.B() * b.u2;
  LGValue v;
  v.value = first + second;
  double radius = std::abs(first) * approx.delta1_env(t);
  if (second != 0.0) radius += std::abs(second) * approx.delta2_env(t);
  v.lower = v.value - radius;
  v.upper = v.value + radius;
  return v;
}

double expanded_exponent(const ScalarMode& mode, double t, bool* advisory, double tol) {
  const double bl = mode.beta * mode.lambda;
  if (advisory) *advisory = mode.eps(0.0) / bl > 0.1 || mode.eps(t) / bl > 0.1;
  return adaptive_simpson(
      [&](double s) {
        const double N = mode.alpha(s) + bl;
        return -mode.lambda / N - mode.lambda * mode.lambda * mode.eps(s) / (N * N * N);
      },
      0.0, t, tol);
}

}  // namespace vmlab
