#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vmlab/assumptions.hpp"
#include "vmlab/integrator.hpp"
#include "vmlab/quadrature.hpp"
#include "vmlab/schedule.hpp"

namespace vmlab {

/// T32: distance to CN with explicit constants. C35: its sqrt(eps)-only
/// relaxation. T36_N / T36_LM: unit-constant shape for the distance to CN / LM.
enum class BoundKind { t32, c35, t36_n, t36_lm };

std::string to_string(BoundKind k);

struct BoundInputs {
  double U0 = 0.0;
  double mu = 1.0;
  double beta = 1.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double eps0 = 0.0;
  double v0_norm = 0.0;
};

struct BoundEnvelope {
  BoundKind kind = BoundKind::t32;
  std::vector<double> times;
  std::vector<double> values;
  std::map<std::string, double> constants;
  BoundInputs inputs;
  bool advisory = false;
  std::vector<std::string> warnings;
};

struct T32Constants {
  double C0 = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
};

/// C0 = 1/(beta mu), C1 = sqrt(2 U0)/(beta mu), C2 = C1 (1/beta + c1 + c2).
T32Constants constants_t32(double U0, double mu, double beta, double c1, double c2);

/// B(t) = C0 e^{-t/beta} eps0 ||v0|| + C1 sqrt(eps(t)) + C2 int_0^t e^{(s-t)/beta} sqrt(eps(s)) ds.
/// Flagged advisory when `a31` is given and does not hold.
BoundEnvelope envelope_t32(const Schedule& eps, const T32Constants& consts, const BoundInputs& inputs,
                           std::span<const double> times, const QuadratureRule& rule = QuadratureRule::adaptive(),
                           const std::optional<AssumptionReport>& a31 = std::nullopt);

/// B(t) = C0 e^{-t/beta} eps0 ||v0|| + C3 sqrt(eps(t)), C3 = C1 + 2 beta C2 / (2 - c1 beta).
/// Requires c1 < 2/beta (Errc::assumption_violated otherwise).
BoundEnvelope envelope_c35(const Schedule& eps, const T32Constants& consts, const BoundInputs& inputs,
                           std::span<const double> times);

/// e^{-t/beta} + sqrt(eps(t)) + alpha(t) + int_0^t e^{(s-t)/beta} (sqrt(eps(s)) + alpha(s)) ds.
BoundEnvelope envelope_t36_shape(const Schedule& eps, const Schedule& alpha, double beta,
                                 std::span<const double> times, BoundKind kind = BoundKind::t36_n,
                                 const QuadratureRule& rule = QuadratureRule::adaptive());

/// Smallest C with distances <= C * shape on the grid.
double fit_constant(std::span<const double> distances, std::span<const double> shape);

/// Pointwise ||a_k - b_k||; both trajectories must share the time grid.
std::vector<double> distance_series(const Trajectory& a, const Trajectory& b);
std::vector<double> distance_series(std::span<const Vector> a, std::span<const Vector> b);

}  // namespace vmlab
