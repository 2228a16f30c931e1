#include "vmlab/modes.hpp"

#include <cmath>
#include <limits>

#include "vmlab/error.hpp"
#include "vmlab/quadrature.hpp"

namespace vmlab {

ModeDecomposition eigenmodes(const QuadraticSpec& spec, double beta, const Schedule& eps, const Schedule& alpha,
                             const Vector& x0, const Vector& v0) {
  const int n = spec.dimension();
  if (x0.size() != n || (v0.size() != 0 && v0.size() != n)) {
    throw Error(Errc::invalid_argument, "eigenmodes: initial data dimension mismatch");
  }
  ModeDecomposition out;
  if (spec.spectrum()) {
    out.Q = Matrix::Identity(n, n);
    out.lambdas = Eigen::Map<const Vector>(spec.spectrum()->data(), n);
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> es(spec.gram());
    if (es.info() != Eigen::Success) throw Error(Errc::numeric, "eigenmodes: eigendecomposition failed");
    out.Q = es.eigenvectors();
    out.lambdas = es.eigenvalues();
  }
  const Vector xm = out.Q.transpose() * x0;
  const Vector vm = v0.size() ? Vector(out.Q.transpose() * v0) : Vector::Zero(n);
  out.modes.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    out.modes.push_back(ScalarMode{out.lambdas(i), beta, eps, alpha, xm(i), vm(i)});
  }
  return out;
}

double closed_form_cn(double x0, double beta, double t) {
  if (!(beta > 0.0)) throw Error(Errc::invalid_argument, "closed_form_cn needs beta > 0");
  return x0 * std::exp(-t / beta);
}

double lm_exponent_integral(const ScalarMode& m, double t, double tol) {
  if (!(m.beta > 0.0) || !(m.lambda > 0.0)) throw Error(Errc::invalid_argument, "mode needs beta, lambda > 0");
  const double bl = m.beta * m.lambda;
  const Schedule& a = m.alpha;
  if (a.family() == ScheduleFamily::zero || a.c0() == 0.0) return t / m.beta;
  if (a.family() == ScheduleFamily::constant || (a.family() == ScheduleFamily::power && a.exponent() == 0.0)) {
    return m.lambda * t / (a.c0() + bl);
  }
  if (a.family() == ScheduleFamily::power && a.exponent() == 1.0) {
    // lambda u / (a0 + bl u) = 1/beta - (a0/beta) / (a0 + bl u), u = s + 1.
    const double a0 = a.c0();
    return t / m.beta - a0 / (m.beta * bl) * std::log((a0 + bl * (t + 1.0)) / (a0 + bl));
  }
  return adaptive_simpson([&](double s) { return m.lambda / (a(s) + bl); }, 0.0, t, tol);
}

double closed_form_lm(const ScalarMode& mode, double t, double tol) {
  return mode.x0 * std::exp(-lm_exponent_integral(mode, t, tol));
}

PR p_r_eval(const ScalarMode& m, double t, int order) {
  if (order < 0 || order > 2) throw Error(Errc::invalid_argument, "p_r_eval order must be 0..2");
  const double lam = m.lambda;
  const double e = m.eps.eval(t, 0);
  if (!(e >= kEpsFloor)) throw Error(Errc::degenerate_schedule, "eps below the positivity floor in p_r_eval");
  const double e1 = m.eps.eval(t, 1);
  const double N = m.alpha.eval(t, 0) + m.beta * lam;  // alpha + beta lambda
  const double a1 = m.alpha.eval(t, 1);

  PR o;
  o.p = N / e;
  o.dp = (a1 * e - N * e1) / (e * e);
  o.r = o.p * o.p / 4.0 + o.dp / 2.0 - lam / e;
  if (!(o.r > 0.0)) {
    throw Error(Errc::assumption_violated,
                "r(" + std::to_string(t) + ") = " + std::to_string(o.r) + " is not positive");
  }
  if (order == 0) return o;

  const double e2 = m.eps.eval(t, 2);
  const double a2 = m.alpha.eval(t, 2);
  const double p = o.p, dp = o.dp, r = o.r;
  o.ddp = (a2 * e * e - 2.0 * a1 * e1 * e - N * e2 * e + 2.0 * N * e1 * e1) / (e * e * e);
  const double ddp = o.ddp;
  o.dr = 2.0 * dp / p * r + 0.25 * (2.0 * ddp - 4.0 * dp * dp / p + 8.0 * lam * dp / (e * p) + 4.0 * lam * e1 / (e * e));
  if (order == 1) return o;

  const double e3 = m.eps.eval(t, 3);
  const double a3 = m.alpha.eval(t, 3);
  // p = N w with w = 1/eps; Leibniz rule for the third derivative.
  const double w = 1.0 / e;
  const double w1 = -e1 / (e * e);
  const double w2 = (2.0 * e1 * e1 - e * e2) / (e * e * e);
  const double w3 = -6.0 * e1 * e1 * e1 / (e * e * e * e) + 6.0 * e1 * e2 / (e * e * e) - e3 / (e * e);
  o.dddp = a3 * w + 3.0 * a2 * w1 + 3.0 * a1 * w2 + N * w3;
  const double dr = o.dr;
  o.ddr = 2.0 * (ddp * p - dp * dp) / (p * p) * r + 2.0 * dp / p * dr +
          0.25 * (2.0 * o.dddp + 4.0 * (dp * dp * dp - 2.0 * ddp * dp * p) / (p * p) +
                  8.0 * lam * (ddp * p * e - dp * dp * e - dp * p * e1) / (e * e * p * p) +
                  4.0 * lam * e2 / (e * e) - 8.0 * lam * e1 * e1 / (e * e * e));
  return o;
}

double phi(const ScalarMode& mode, double t) {
  const PR v = p_r_eval(mode, t, 2);
  return (4.0 * v.r * v.ddr - 5.0 * v.dr * v.dr) / (16.0 * std::pow(v.r, 2.5));
}

PhiIntegral phi_integral(const ScalarMode& mode, double t_tail, double tol) {
  if (!(t_tail >= 10.0)) throw Error(Errc::invalid_argument, "phi_integral needs T_tail >= 10");
  const ScalarFn abs_phi = [&](double s) { return std::abs(phi(mode, s)); };

  std::vector<double> edges{0.0, 1.0};
  while (edges.back() * 10.0 <= t_tail * (1.0 + 1e-12)) edges.push_back(edges.back() * 10.0);
  if (edges.back() < t_tail) edges.push_back(t_tail);

  PhiIntegral out;
  std::vector<double> pieces;
  for (std::size_t i = 1; i < edges.size(); ++i) {
    // Subdivide each decade so the absolute tolerance is meaningful at every scale.
    double piece = 0.0;
    const int sub = 16;
    const double h = (edges[i] - edges[i - 1]) / sub;
    for (int j = 0; j < sub; ++j) {
      piece += adaptive_simpson(abs_phi, edges[i - 1] + j * h, edges[i - 1] + (j + 1) * h, tol / sub);
    }
    pieces.push_back(piece);
    out.quadrature += piece;
  }

  const double last = pieces.back();
  const double prev = pieces[pieces.size() - 2];
  if (last == 0.0) {
    out.decay_ratio = 0.0;
    out.tail = 0.0;
  } else if (prev == 0.0) {
    out.decay_ratio = std::numeric_limits<double>::infinity();
    out.convergent = false;
  } else {
    out.decay_ratio = last / prev;
    // Decade contributions of a t^{-1-d} tail shrink by 10^{-d}.
    if (out.decay_ratio < 0.9) {
      out.tail = last * out.decay_ratio / (1.0 - out.decay_ratio);
    } else {
      out.convergent = false;
    }
  }
  out.value = out.quadrature + out.tail;
  return out;
}

}  // namespace vmlab
