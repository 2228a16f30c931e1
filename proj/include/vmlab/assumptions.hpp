#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vmlab/schedule.hpp"

namespace vmlab {

/// Outcome of checking one schedule assumption.
///
/// `holds` is only meaningful when `determined` is true (tables cannot be
/// classified analytically for A4.6). When `holds` is true the constants
/// certify the inequality on every point of the check grid from `t0` on.
struct AssumptionReport {
  std::string id;  // "A3.1", "A3.5", "A4.2", "A4.6"
  bool holds = false;
  bool determined = true;
  double c1 = 0.0;
  double c2 = 0.0;
  double bound = 0.0;          // A4.2: min over the grid of (beta lambda)^2 / (2|alpha'| + 4 lambda)
  std::optional<double> witness;  // time of the worst ratio / violation
  double t0 = 0.0;
  std::string note;
};

/// {0} u {gamma 2^j : gamma 2^j < T} u {T}.
std::vector<double> check_grid(double gamma, double horizon);

/// Target constants for the certified-region search. When given, `t0` is
/// the smallest grid time after which the ratios stay below the targets.
struct ConstantTargets {
  std::optional<double> c1;
  std::optional<double> c2;
};

/// |eps'| <= c1 eps and alpha <= c2 eps.
AssumptionReport check_a31(const Schedule& eps, const Schedule& alpha, const std::vector<double>& grid,
                           ConstantTargets targets = {});

/// |eps'| <= c1 eps and |alpha'| <= c2 alpha.
AssumptionReport check_a35(const Schedule& eps, const Schedule& alpha, const std::vector<double>& grid,
                           ConstantTargets targets = {});

/// eps0 < (beta lambda)^2 / (2|alpha'(t)| + 4 lambda) for all grid times.
AssumptionReport check_a42(const Schedule& eps, const Schedule& alpha, double lambda, double beta,
                           const std::vector<double>& grid);

/// Integrability of derivatives up to order 3, eps -> 0, eps'^2/eps integrable.
/// Analytic for power/constant/zero families; tables come back undetermined.
AssumptionReport check_a46(const Schedule& eps, const Schedule& alpha);

/// Structural requirements on a coefficient: non-negative and non-increasing
/// on the grid, and strictly positive when `must_be_positive` (eps).
/// Returns a list of human-readable problems; empty means valid.
std::vector<std::string> validate_structure(const Schedule& s, bool must_be_positive,
                                            const std::vector<double>& grid);

}  // namespace vmlab
