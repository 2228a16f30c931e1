#pragma once

#include <string>
#include <vector>

#include "vmlab/linalg.hpp"
#include "vmlab/objective.hpp"
#include "vmlab/schedule.hpp"

namespace vmlab {

/// CN: continuous Newton, LM: Levenberg-Marquardt flow, VM: the
/// variable-mass inertial Newton dynamics.
enum class Scheme { cn, lm, vm };

std::string to_string(Scheme s);

struct SolverConfig {
  double gamma = 0.1;
  double beta = 1.0;
  double horizon = 50.0;
  Vector x0;
  Vector v0;  // initial velocity, VM only; empty means zero
  Scheme scheme = Scheme::vm;

  /// Throws Errc::invalid_argument when gamma, beta, T or the dimensions are off.
  void validate(const Objective& obj) const;
  /// K = floor(T / gamma), robust to T being an exact multiple of gamma.
  long steps() const;
};

struct StepDiagnostics {
  double condition = 1.0;
  double residual = 0.0;
};

struct Trajectory {
  Scheme scheme = Scheme::vm;
  double gamma = 0.0;
  std::vector<double> times;        // t_k = gamma k
  std::vector<Vector> states;       // x^(k)
  std::vector<Vector> velocities;   // (x^(k) - x^(k-1)) / gamma, v0 at k = 0
  std::vector<StepDiagnostics> diagnostics;  // one per step, diagnostics[k] produced x^(k+1)

  std::size_t size() const { return states.size(); }
  int dimension() const { return states.empty() ? 0 : static_cast<int>(states.front().size()); }
};

// All three schemes invert beta * Hess f(x_k) plus a multiple of the
// identity. They share the same assembly so that setting eps_k = 0 or
// alpha_k = 0 reproduces the simpler scheme exactly.

/// x - gamma [beta H]^{-1} grad f.
Vector step_cn(const Objective& obj, const Vector& x, double gamma, double beta,
               StepDiagnostics* diag = nullptr, long step = -1);

/// x - gamma [alpha I + beta H]^{-1} grad f.
Vector step_lm(const Objective& obj, const Vector& x, double gamma, double beta, double alpha,
               StepDiagnostics* diag = nullptr, long step = -1);

/// x + [(eps + gamma alpha) I + gamma beta H]^{-1} (eps (x - x_prev) - gamma^2 grad f).
Vector step_vm(const Objective& obj, const Vector& x, const Vector& x_prev, double gamma, double beta,
               double eps, double alpha, StepDiagnostics* diag = nullptr, long step = -1);

/// States beyond this magnitude count as diverged; squared norms and
/// residuals would overflow shortly after.
inline constexpr double kDivergenceBound = 1e150;

/// Runs the configured scheme on [0, T]. Schedules are sampled at the left
/// endpoint t_k. VM starts from x^(-1) = x0 - gamma v0. Throws
/// Errc::divergence (index = last finite step) on a non-finite state or one
/// larger than kDivergenceBound.
Trajectory integrate(const Objective& obj, const Schedule& eps, const Schedule& alpha, const SolverConfig& cfg);

/// U_k = eps(t_k)/2 ||v_k||^2 + f(x_k) - f(x*). When the minimizer is
/// unknown f(x*) is replaced by the smallest f value along the trajectory.
std::vector<double> lyapunov_series(const Trajectory& traj, const Schedule& eps, const Objective& obj);

}  // namespace vmlab
