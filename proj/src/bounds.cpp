#include "vmlab/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "vmlab/error.hpp"

namespace vmlab {

std::string to_string(BoundKind k) {
  switch (k) {
    case BoundKind::t32: return "t32";
    case BoundKind::c35: return "c35";
    case BoundKind::t36_n: return "t36_n";
    case BoundKind::t36_lm: return "t36_lm";
  }
  return "?";
}

T32Constants constants_t32(double U0, double mu, double beta, double c1, double c2) {
  if (!(mu > 0.0)) throw Error(Errc::invalid_modulus, "strong-convexity modulus must be positive");
  if (!(beta > 0.0)) throw Error(Errc::invalid_argument, "beta must be positive");
  if (U0 < 0.0) throw Error(Errc::invalid_argument, "U0 must be non-negative");
  T32Constants c;
  c.C0 = 1.0 / (beta * mu);
  c.C1 = std::sqrt(2.0 * U0) / (beta * mu);
  c.C2 = c.C1 * (1.0 / beta + c1 + c2);
  return c;
}

namespace {

std::vector<double> initial_velocity_term(const T32Constants& c, const BoundInputs& in, std::span<const double> times) {
  std::vector<double> out(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    out[k] = c.C0 * std::exp(-times[k] / in.beta) * in.eps0 * in.v0_norm;
  }
  return out;
}

}  // namespace

BoundEnvelope envelope_t32(const Schedule& eps, const T32Constants& consts, const BoundInputs& inputs,
                           std::span<const double> times, const QuadratureRule& rule,
                           const std::optional<AssumptionReport>& a31) {
  BoundEnvelope env;
  env.kind = BoundKind::t32;
  env.inputs = inputs;
  env.times.assign(times.begin(), times.end());
  env.constants = {{"C0", consts.C0}, {"C1", consts.C1}, {"C2", consts.C2}};
  if (a31 && !a31->holds) {
    env.advisory = true;
    env.warnings.push_back("A31 does not hold on the check grid; envelope is advisory");
  }
  const ScalarFn sqrt_eps = [&eps](double s) { return std::sqrt(eps(s)); };
  const auto integral = weighted_exp_integral_series(sqrt_eps, times, inputs.beta, rule);
  env.values = initial_velocity_term(consts, inputs, times);
  for (std::size_t k = 0; k < times.size(); ++k) {
    env.values[k] += consts.C1 * std::sqrt(eps(times[k])) + consts.C2 * integral[k];
  }
  return env;
}

BoundEnvelope envelope_c35(const Schedule& eps, const T32Constants& consts, const BoundInputs& inputs,
                           std::span<const double> times) {
  const double slack = 2.0 - inputs.c1 * inputs.beta;
  if (!(slack > 0.0)) {
    throw Error(Errc::assumption_violated, "envelope_c35 requires c1 < 2/beta");
  }
  BoundEnvelope env;
  env.kind = BoundKind::c35;
  env.inputs = inputs;
  env.times.assign(times.begin(), times.end());
  // int_0^t e^{(s-t)/beta} sqrt(eps(s)) ds <= 2 beta / (2 - c1 beta) sqrt(eps(t))
  const double factor = 2.0 * inputs.beta / slack;
  const double C3 = consts.C1 + consts.C2 * factor;
  env.constants = {{"C0", consts.C0}, {"C1", consts.C1}, {"C2", consts.C2}, {"C3", C3}};
  if (factor > 1e6) env.warnings.push_back("c1 is close to 2/beta; C3 is very large");
  env.values = initial_velocity_term(consts, inputs, times);
  for (std::size_t k = 0; k < times.size(); ++k) env.values[k] += C3 * std::sqrt(eps(times[k]));
  return env;
}

BoundEnvelope envelope_t36_shape(const Schedule& eps, const Schedule& alpha, double beta,
                                 std::span<const double> times, BoundKind kind, const QuadratureRule& rule) {
  if (kind != BoundKind::t36_n && kind != BoundKind::t36_lm) {
    throw Error(Errc::invalid_argument, "envelope_t36_shape only builds t36_n or t36_lm shapes");
  }
  BoundEnvelope env;
  env.kind = kind;
  env.inputs.beta = beta;
  env.inputs.eps0 = eps(0.0);
  env.times.assign(times.begin(), times.end());
  env.constants = {{"C", 1.0}};
  const ScalarFn g = [&](double s) { return std::sqrt(eps(s)) + alpha(s); };
  const auto integral = weighted_exp_integral_series(g, times, beta, rule);
  env.values.resize(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k];
    env.values[k] = std::exp(-t / beta) + std::sqrt(eps(t)) + alpha(t) + integral[k];
  }
  return env;
}

double fit_constant(std::span<const double> distances, std::span<const double> shape) {
  if (distances.size() != shape.size()) throw Error(Errc::alignment, "fit_constant: series lengths differ");
  double c = 0.0;
  for (std::size_t k = 0; k < shape.size(); ++k) {
    if (!(shape[k] > 0.0)) throw Error(Errc::degenerate_fit, "fit_constant: shape vanishes at index " + std::to_string(k));
    c = std::max(c, distances[k] / shape[k]);
  }
  return c;
}

std::vector<double> distance_series(std::span<const Vector> a, std::span<const Vector> b) {
  if (a.size() != b.size()) throw Error(Errc::alignment, "distance_series: trajectories have different lengths");
  std::vector<double> d(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].size() != b[k].size()) throw Error(Errc::alignment, "distance_series: dimension mismatch");
    d[k] = (a[k] - b[k]).norm();
  }
  return d;
}

std::vector<double> distance_series(const Trajectory& a, const Trajectory& b) {
  if (a.times.size() != b.times.size()) {
    throw Error(Errc::alignment, "distance_series: trajectories have different lengths");
  }
  for (std::size_t k = 0; k < a.times.size(); ++k) {
    if (std::abs(a.times[k] - b.times[k]) > 1e-12 * (1.0 + std::abs(a.times[k]))) {
      throw Error(Errc::alignment, "distance_series: time grids differ at index " + std::to_string(k));
    }
  }
  return distance_series(std::span<const Vector>(a.states), std::span<const Vector>(b.states));
}

}  // namespace vmlab
