#pragma once

#include <functional>
#include <span>
#include <vector>

namespace vmlab {

using ScalarFn = std::function<double(double)>;

/// Adaptive Simpson with Richardson correction. Subintervals are refined
/// until successive estimates differ by less than 15 * tol (scaled to the
/// subinterval) or `max_depth` is reached.
double adaptive_simpson(const ScalarFn& f, double a, double b, double tol, int max_depth = 48);

/// Composite trapezoid on [a, b] with spacing close to h (last panel may be shorter).
double trapezoid(const ScalarFn& f, double a, double b, double h);

struct QuadratureRule {
  enum class Kind { trapezoid, adaptive_simpson };
  Kind kind = Kind::adaptive_simpson;
  double tol = 1e-12;  // adaptive mode
  double step = 0.1;   // trapezoid mode: grid spacing

  static QuadratureRule adaptive(double tol = 1e-12) { return {Kind::adaptive_simpson, tol, 0.1}; }
  static QuadratureRule grid(double step) { return {Kind::trapezoid, 0.0, step}; }
};

/// int_0^t e^{(s - t)/beta} g(s) ds.
double weighted_exp_integral(const ScalarFn& g, double t, double beta, const QuadratureRule& rule);

/// Same integral for every time on an increasing grid starting at 0, built
/// with the recursion I(t_{k+1}) = e^{-dt/beta} I(t_k) + int_{t_k}^{t_{k+1}}.
std::vector<double> weighted_exp_integral_series(const ScalarFn& g, std::span<const double> times, double beta,
                                                 const QuadratureRule& rule);

/// Running integral F(t) = int_0^t f with values cached on a uniform node
/// grid over [0, t_max]. Queries beyond t_max integrate from the last node.
/// Immutable after construction.
class PrefixIntegral {
 public:
  PrefixIntegral() = default;
  PrefixIntegral(ScalarFn f, double t_max, double node_spacing, double tol);

  double operator()(double t) const;
  double t_max() const { return nodes_.empty() ? 0.0 : spacing_ * static_cast<double>(nodes_.size() - 1); }

 private:
  ScalarFn f_;
  double spacing_ = 1.0;
  double tol_ = 1e-12;
  std::vector<double> nodes_;  // F(k * spacing)
};

}  // namespace vmlab
