#include "vmlab/assumptions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vmlab/error.hpp"

namespace vmlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Ratio growth between the first half of the grid and the full grid beyond
// which a grid maximum is treated as unbounded.
constexpr double kGrowthFactor = 1.5;

double eps_checked(const Schedule& eps, double t) {
  const double e = eps(t);
  if (!(e >= kEpsFloor)) {
    throw Error(Errc::degenerate_schedule,
                "eps(" + std::to_string(t) + ") = " + std::to_string(e) + " is below the positivity floor");
  }
  return e;
}

struct GridMax {
  double value = 0.0;
  double at = 0.0;
  bool unbounded = false;
};

GridMax grid_max(const std::vector<double>& grid, const std::vector<double>& ratio) {
  GridMax m;
  double first_half = 0.0;
  const double half = grid.back() / 2.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (ratio[i] > m.value || i == 0) {
      m.value = ratio[i];
      m.at = grid[i];
    }
    if (grid[i] <= half) first_half = std::max(first_half, ratio[i]);
  }
  m.unbounded = !std::isfinite(m.value) || (m.value > kGrowthFactor * first_half && m.at > half);
  return m;
}

double certified_from(const std::vector<double>& grid, const std::vector<double>& ratio,
                      std::optional<double> target) {
  if (!target) return 0.0;
  double t0 = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (ratio[i] > *target) t0 = i + 1 < grid.size() ? grid[i + 1] : kInf;
  }
  return t0;
}

void require_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw Error(Errc::invalid_argument, "assumption check needs a non-empty grid");
}

// |eps'|/eps for a power-like eps: a/(t+1), largest at t = 0.
double power_log_slope_max(const Schedule& s) { return s.c0() == 0.0 ? 0.0 : s.exponent(); }

std::vector<double> eps_log_slopes(const Schedule& eps, const std::vector<double>& grid) {
  std::vector<double> r(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    r[i] = std::abs(eps.slope(grid[i])) / eps_checked(eps, grid[i]);
  }
  return r;
}

}  // namespace

std::vector<double> check_grid(double gamma, double horizon) {
  if (!(gamma > 0.0) || !(horizon > 0.0)) {
    throw Error(Errc::invalid_argument, "check grid needs gamma > 0 and T > 0");
  }
  std::vector<double> g{0.0};
  for (double t = gamma; t < horizon; t *= 2.0) g.push_back(t);
  g.push_back(horizon);
  return g;
}

AssumptionReport check_a31(const Schedule& eps, const Schedule& alpha, const std::vector<double>& grid,
                           ConstantTargets targets) {
  require_grid(grid);
  AssumptionReport rep;
  rep.id = "A3.1";

  const auto r1 = eps_log_slopes(eps, grid);
  std::vector<double> r2(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) r2[i] = alpha(grid[i]) / eps(grid[i]);
  rep.t0 = std::max(certified_from(grid, r1, targets.c1), certified_from(grid, r2, targets.c2));

  if (eps.is_power_like() && alpha.is_power_like()) {
    rep.c1 = power_log_slope_max(eps);
    if (alpha.c0() == 0.0) {
      rep.c2 = 0.0;
      rep.holds = true;
    } else if (alpha.exponent() >= eps.exponent()) {
      // alpha/eps = (alpha0/eps0) (t+1)^{a_eps - a_alpha}, non-increasing.
      rep.c2 = alpha.c0() / eps.c0();
      rep.holds = true;
    } else {
      rep.c2 = kInf;
      rep.witness = grid.back();
      rep.note = "alpha decays slower than eps: alpha/eps grows without bound";
    }
    if (rep.holds) rep.witness = 0.0;
    return rep;
  }

  const GridMax m1 = grid_max(grid, r1);
  const GridMax m2 = grid_max(grid, r2);
  rep.c1 = m1.value;
  rep.c2 = m2.value;
  rep.holds = !m1.unbounded && !m2.unbounded;
  rep.witness = m1.unbounded || (!m2.unbounded && m1.value >= m2.value) ? m1.at : m2.at;
  if (m1.unbounded) rep.note = "|eps'|/eps grows along the grid";
  if (m2.unbounded) rep.note += (rep.note.empty() ? "" : "; ") + std::string("alpha/eps grows along the grid");
  return rep;
}

AssumptionReport check_a35(const Schedule& eps, const Schedule& alpha, const std::vector<double>& grid,
                           ConstantTargets targets) {
  require_grid(grid);
  AssumptionReport rep;
  rep.id = "A3.5";

  const auto r1 = eps_log_slopes(eps, grid);
  std::vector<double> r2(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double a = alpha(grid[i]);
    const double da = std::abs(alpha.slope(grid[i]));
    r2[i] = da == 0.0 ? 0.0 : (a > 0.0 ? da / a : kInf);
  }
  rep.t0 = std::max(certified_from(grid, r1, targets.c1), certified_from(grid, r2, targets.c2));

  if (eps.is_power_like() && alpha.is_power_like()) {
    rep.c1 = power_log_slope_max(eps);
    rep.c2 = power_log_slope_max(alpha);  // alpha == 0 gives 0 by convention
    rep.holds = true;
    rep.witness = 0.0;
    return rep;
  }

  const GridMax m1 = grid_max(grid, r1);
  const GridMax m2 = grid_max(grid, r2);
  rep.c1 = m1.value;
  rep.c2 = m2.value;
  rep.holds = !m1.unbounded && !m2.unbounded;
  rep.witness = m1.unbounded || (!m2.unbounded && m1.value >= m2.value) ? m1.at : m2.at;
  if (m1.unbounded) rep.note = "|eps'|/eps grows along the grid";
  if (m2.unbounded) rep.note += (rep.note.empty() ? "" : "; ") + std::string("|alpha'|/alpha grows along the grid");
  return rep;
}

AssumptionReport check_a42(const Schedule& eps, const Schedule& alpha, double lambda, double beta,
                           const std::vector<double>& grid) {
  require_grid(grid);
  if (!(lambda > 0.0) || !(beta > 0.0)) {
    throw Error(Errc::invalid_argument, "check_a42 needs lambda > 0 and beta > 0");
  }
  AssumptionReport rep;
  rep.id = "A4.2";
  const double bl2 = (beta * lambda) * (beta * lambda);
  const double eps0 = eps(0.0);

  if (alpha.is_power_like()) {
    // |alpha'(t)| = alpha0 b / (t+1)^{b+1} is largest at t = 0.
    rep.bound = bl2 / (2.0 * std::abs(alpha.eval(0.0, 1)) + 4.0 * lambda);
    rep.witness = 0.0;
  } else {
    rep.bound = kInf;
    for (double t : grid) {
      const double b = bl2 / (2.0 * std::abs(alpha.slope(t)) + 4.0 * lambda);
      if (b < rep.bound) {
        rep.bound = b;
        rep.witness = t;
      }
    }
  }
  rep.holds = eps0 < rep.bound;
  if (!rep.holds) rep.note = "eps0 is not below (beta lambda)^2 / (2|alpha'| + 4 lambda)";
  return rep;
}

AssumptionReport check_a46(const Schedule& eps, const Schedule& alpha) {
  AssumptionReport rep;
  rep.id = "A4.6";
  if (!eps.is_power_like() || !alpha.is_power_like()) {
    rep.determined = false;
    rep.note = "table schedules cannot be classified analytically";
    return rep;
  }
  if (eps.c0() == 0.0) {
    rep.note = "eps must be positive";
    return rep;
  }
  // eps = eps0 (t+1)^{-a}: derivatives of every order are integrable iff
  // a > 0 (or identically zero), eps -> 0 iff a > 0, and eps'^2/eps is
  // proportional to (t+1)^{-a-2}, integrable for a > 0.
  if (!(eps.exponent() > 0.0)) {
    rep.note = "eps does not vanish";
    return rep;
  }
  // alpha = alpha0 (t+1)^{-b}, b >= 0: alpha^{(k)} ~ (t+1)^{-b-k} is
  // integrable for k >= 1 and vanishes when b = 0, so alpha may be constant.
  rep.holds = true;
  return rep;
}

std::vector<std::string> validate_structure(const Schedule& s, bool must_be_positive,
                                            const std::vector<double>& grid) {
  std::vector<std::string> problems;
  double prev = kInf;
  for (double t : grid) {
    const double v = s(t);
    if (!std::isfinite(v) || v < 0.0) {
      problems.push_back("negative or non-finite value at t=" + std::to_string(t));
    } else if (must_be_positive && v < kEpsFloor) {
      problems.push_back("value below positivity floor at t=" + std::to_string(t));
    }
    if (v > prev) problems.push_back("increases at t=" + std::to_string(t));
    prev = v;
  }
  if (s.family() == ScheduleFamily::table) {
    const auto& vv = s.table_values();
    for (std::size_t i = 1; i < vv.size(); ++i) {
      if (vv[i] > vv[i - 1]) {
        problems.push_back("table increases between nodes " + std::to_string(i - 1) + " and " + std::to_string(i));
        break;
      }
    }
    if (must_be_positive && vv.back() < kEpsFloor) problems.push_back("table reaches the positivity floor");
  }
  return problems;
}

}  // namespace vmlab
