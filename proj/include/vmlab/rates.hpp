#pragma once

#include <optional>
#include <span>
#include <string>

#include "vmlab/schedule.hpp"

namespace vmlab {

enum class RateTarget { cn, lm };
enum class Verdict { faster, as_fast, slower, undetermined };
enum class Dominance { eps, alpha, ambiguous };

std::string to_string(RateTarget t);
std::string to_string(Verdict v);
std::string to_string(Dominance d);

struct RateClass {
  RateTarget target = RateTarget::cn;
  Verdict verdict = Verdict::undetermined;
  std::string rationale;
};

struct RateClassification {
  RateClass vs_cn;
  RateClass vs_lm;
  Dominance dominance = Dominance::ambiguous;
  /// Filled only when dominance is ambiguous: the vs-CN verdict each branch would give.
  std::optional<RateClass> vs_cn_if_eps_dominant;
  std::optional<RateClass> vs_cn_if_alpha_dominant;
  bool assumptions_hold = true;  // A4.6 analytic verdict
  std::string note;
};

/// Dominance of eps over alpha on the tail half [T/2, T] by strict majority
/// of `samples` uniformly spaced points; ties are ambiguous.
Dominance tail_dominance(const Schedule& eps, const Schedule& alpha, double horizon, int samples = 101);

/// Asymptotic rate of the VM dynamics relative to CN and LM on quadratics:
///   vs LM: faster iff eps non-integrable, as fast otherwise;
///   vs CN, alpha dominant: slower iff alpha non-integrable, as fast otherwise;
///   vs CN, eps dominant: faster iff eps non-integrable, as fast otherwise.
RateClassification classify_rates(const Schedule& eps, const Schedule& alpha, double horizon = 200.0);

struct DecayFit {
  double slope = 0.0;
  double intercept = 0.0;
  double t_begin = 0.0;
  double t_end = 0.0;
  std::size_t points = 0;
  bool shrunk = false;
};

/// Least-squares slope of log|series| against t over [t_a, t_b]. The window
/// is cut short at the first sample that is zero or below 1e-290; fewer than
/// three usable samples raises Errc::underflow.
DecayFit estimate_decay_rate(std::span<const double> times, std::span<const double> series, double t_a, double t_b);

/// Measured verdict from fitted slopes: faster when the VM slope is below the
/// reference by more than `margin`, slower when above by more than `margin`.
Verdict compare_slopes(double vm_slope, double reference_slope, double margin = 0.02);

}  // namespace vmlab
