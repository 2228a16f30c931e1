#include "vmlab/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "vmlab/error.hpp"

namespace vmlab {

namespace {

struct Panel {
  double a, m, b;
  double fa, fm, fb;
  double whole;
};

double simpson(double a, double b, double fa, double fm, double fb) { return (b - a) / 6.0 * (fa + 4.0 * fm + fb); }

double refine(const ScalarFn& f, const Panel& p, double tol, int depth) {
  const double lm = 0.5 * (p.a + p.m);
  const double rm = 0.5 * (p.m + p.b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(p.a, p.m, p.fa, flm, p.fm);
  const double right = simpson(p.m, p.b, p.fm, frm, p.fb);
  const double delta = left + right - p.whole;
  // The relative floor keeps huge integrands from chasing an unreachable absolute tolerance.
  const double floor = 1e-14 * (std::abs(left) + std::abs(right));
  if (depth <= 0 || std::abs(delta) <= 15.0 * std::max(tol, floor) || !std::isfinite(delta)) {
    return left + right + delta / 15.0;
  }
  return refine(f, {p.a, lm, p.m, p.fa, flm, p.fm, left}, tol / 2.0, depth - 1) +
         refine(f, {p.m, rm, p.b, p.fm, frm, p.fb, right}, tol / 2.0, depth - 1);
}

}  // namespace

double adaptive_simpson(const ScalarFn& f, double a, double b, double tol, int max_depth) {
  if (a == b) return 0.0;
  if (b < a) return -adaptive_simpson(f, b, a, tol, max_depth);
  if (!(tol > 0.0)) throw Error(Errc::invalid_argument, "adaptive_simpson needs tol > 0");
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  // Start from two panels so integrands vanishing at a, m and b are still probed.
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  return refine(f, {a, lm, m, fa, flm, fm, simpson(a, m, fa, flm, fm)}, tol / 2.0, max_depth) +
         refine(f, {m, rm, b, fm, frm, fb, simpson(m, b, fm, frm, fb)}, tol / 2.0, max_depth);
}

double trapezoid(const ScalarFn& f, double a, double b, double h) {
  if (a == b) return 0.0;
  if (!(h > 0.0)) throw Error(Errc::invalid_argument, "trapezoid needs h > 0");
  const auto panels = static_cast<long>(std::ceil((b - a) / h - 1e-9));
  double sum = 0.0;
  double prev_t = a;
  double prev_f = f(a);
  for (long k = 1; k <= panels; ++k) {
    const double t = k == panels ? b : a + static_cast<double>(k) * h;
    const double ft = f(t);
    sum += 0.5 * (t - prev_t) * (prev_f + ft);
    prev_t = t;
    prev_f = ft;
  }
  return sum;
}

double weighted_exp_integral(const ScalarFn& g, double t, double beta, const QuadratureRule& rule) {
  if (!(beta > 0.0)) throw Error(Errc::invalid_argument, "weighted_exp_integral needs beta > 0");
  if (t <= 0.0) return 0.0;
  const ScalarFn w = [&](double s) { return std::exp((s - t) / beta) * g(s); };
  if (rule.kind == QuadratureRule::Kind::trapezoid) return trapezoid(w, 0.0, t, rule.step);
  return adaptive_simpson(w, 0.0, t, rule.tol);
}

std::vector<double> weighted_exp_integral_series(const ScalarFn& g, std::span<const double> times, double beta,
                                                 const QuadratureRule& rule) {
  if (!(beta > 0.0)) throw Error(Errc::invalid_argument, "weighted_exp_integral needs beta > 0");
  std::vector<double> out(times.size(), 0.0);
  if (times.empty()) return out;
  double acc = weighted_exp_integral(g, times[0], beta, rule);
  out[0] = acc;
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double t0 = times[k - 1];
    const double t1 = times[k];
    const ScalarFn w = [&](double s) { return std::exp((s - t1) / beta) * g(s); };
    const double piece = rule.kind == QuadratureRule::Kind::trapezoid ? trapezoid(w, t0, t1, rule.step)
                                                                      : adaptive_simpson(w, t0, t1, rule.tol);
    acc = std::exp(-(t1 - t0) / beta) * acc + piece;
    out[k] = acc;
  }
  return out;
}

PrefixIntegral::PrefixIntegral(ScalarFn f, double t_max, double node_spacing, double tol)
    : f_(std::move(f)), spacing_(node_spacing), tol_(tol) {
  if (!(node_spacing > 0.0) || !(t_max >= 0.0)) {
    throw Error(Errc::invalid_argument, "PrefixIntegral needs spacing > 0 and t_max >= 0");
  }
  const auto count = static_cast<std::size_t>(std::ceil(t_max / spacing_)) + 1;
  nodes_.resize(count);
  nodes_[0] = 0.0;
  for (std::size_t k = 1; k < count; ++k) {
    const double a = spacing_ * static_cast<double>(k - 1);
    nodes_[k] = nodes_[k - 1] + adaptive_simpson(f_, a, a + spacing_, tol_);
  }
}

double PrefixIntegral::operator()(double t) const {
  if (nodes_.empty()) throw Error(Errc::invalid_argument, "PrefixIntegral is empty");
  if (t <= 0.0) return t == 0.0 ? 0.0 : -adaptive_simpson(f_, t, 0.0, tol_);
  auto k = static_cast<std::size_t>(std::floor(t / spacing_));
  if (k >= nodes_.size()) k = nodes_.size() - 1;
  const double a = spacing_ * static_cast<double>(k);
  return nodes_[k] + adaptive_simpson(f_, a, t, tol_);
}

}  // namespace vmlab
