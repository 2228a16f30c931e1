#include "vmlab/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vmlab/error.hpp"

namespace vmlab {

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::cn: return "cn";
    case Scheme::lm: return "lm";
    case Scheme::vm: return "vm";
  }
  return "?";
}

void SolverConfig::validate(const Objective& obj) const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw Error(Errc::invalid_argument, "gamma must be positive");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw Error(Errc::invalid_argument, "beta must be positive");
  if (!(horizon >= gamma)) throw Error(Errc::invalid_argument, "horizon T must be at least gamma");
  if (x0.size() != obj.dimension) throw Error(Errc::invalid_argument, "x0 dimension does not match the objective");
  if (v0.size() != 0 && v0.size() != obj.dimension) {
    throw Error(Errc::invalid_argument, "v0 dimension does not match the objective");
  }
}

long SolverConfig::steps() const { return static_cast<long>(std::floor(horizon / gamma + 1e-9)); }

namespace {

// beta H + shift I and the solve, shared by the three schemes.
Vector shifted_newton_solve(const Objective& obj, const Vector& x, double beta, double shift, const Vector& rhs,
                            StepDiagnostics* diag, long step) {
  Matrix M = obj.hess(x);
  M *= beta;
  M.diagonal().array() += shift;
  SpdSolve sol = solve_spd(M, rhs, step);
  if (diag) {
    diag->condition = sol.condition;
    diag->residual = sol.residual;
  }
  return std::move(sol.x);
}

}  // namespace

Vector step_cn(const Objective& obj, const Vector& x, double gamma, double beta, StepDiagnostics* diag, long step) {
  return step_lm(obj, x, gamma, beta, 0.0, diag, step);
}

Vector step_lm(const Objective& obj, const Vector& x, double gamma, double beta, double alpha,
               StepDiagnostics* diag, long step) {
  if (alpha < 0.0) throw Error(Errc::invalid_argument, "step_lm needs alpha >= 0");
  const Vector rhs = -gamma * obj.grad(x);
  return x + shifted_newton_solve(obj, x, beta, alpha, rhs, diag, step);
}

Vector step_vm(const Objective& obj, const Vector& x, const Vector& x_prev, double gamma, double beta,
               double eps, double alpha, StepDiagnostics* diag, long step) {
  if (eps < 0.0 || alpha < 0.0) throw Error(Errc::invalid_argument, "step_vm needs eps >= 0 and alpha >= 0");
  // The system is divided through by gamma: [(eps/gamma + alpha) I + beta H] d
  // = (eps/gamma)(x - x_prev) - gamma grad f. With eps = 0 this is the LM system.
  const double mass = eps / gamma;
  const Vector rhs = mass * (x - x_prev) + (-gamma * obj.grad(x));
  return x + shifted_newton_solve(obj, x, beta, mass + alpha, rhs, diag, step);
}

Trajectory integrate(const Objective& obj, const Schedule& eps, const Schedule& alpha, const SolverConfig& cfg) {
  cfg.validate(obj);
  const long K = cfg.steps();
  const Vector v0 = cfg.v0.size() ? cfg.v0 : Vector::Zero(obj.dimension);

  Trajectory tr;
  tr.scheme = cfg.scheme;
  tr.gamma = cfg.gamma;
  tr.times.reserve(static_cast<std::size_t>(K) + 1);
  tr.states.reserve(static_cast<std::size_t>(K) + 1);
  tr.velocities.reserve(static_cast<std::size_t>(K) + 1);
  tr.diagnostics.reserve(static_cast<std::size_t>(K));

  tr.times.push_back(0.0);
  tr.states.push_back(cfg.x0);
  tr.velocities.push_back(v0);
  Vector x_prev = cfg.x0 - cfg.gamma * v0;

  for (long k = 0; k < K; ++k) {
    const double t = cfg.gamma * static_cast<double>(k);
    const Vector& x = tr.states.back();
    StepDiagnostics diag;
    Vector next;
    switch (cfg.scheme) {
      case Scheme::cn:
        next = step_cn(obj, x, cfg.gamma, cfg.beta, &diag, k);
        break;
      case Scheme::lm:
        next = step_lm(obj, x, cfg.gamma, cfg.beta, alpha(t), &diag, k);
        break;
      case Scheme::vm:
        next = step_vm(obj, x, x_prev, cfg.gamma, cfg.beta, eps(t), alpha(t), &diag, k);
        break;
    }
    if (!next.allFinite() || next.lpNorm<Eigen::Infinity>() > kDivergenceBound) {
      throw Error(Errc::divergence,
                  "state blew up after step " + std::to_string(k) + " (" + to_string(cfg.scheme) + ")", k);
    }
    x_prev = x;
    tr.velocities.push_back((next - x) / cfg.gamma);
    tr.states.push_back(std::move(next));
    tr.times.push_back(cfg.gamma * static_cast<double>(k + 1));
    tr.diagnostics.push_back(diag);
  }
  return tr;
}

std::vector<double> lyapunov_series(const Trajectory& traj, const Schedule& eps, const Objective& obj) {
  std::vector<double> fvals(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) fvals[k] = obj.eval(traj.states[k]);
  double fstar;
  if (auto v = obj.optimal_value()) {
    fstar = *v;
  } else {
    fstar = fvals.empty() ? 0.0 : *std::min_element(fvals.begin(), fvals.end());
  }
  std::vector<double> U(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) {
    U[k] = 0.5 * eps(traj.times[k]) * traj.velocities[k].squaredNorm() + fvals[k] - fstar;
  }
  return U;
}

}  // namespace vmlab
