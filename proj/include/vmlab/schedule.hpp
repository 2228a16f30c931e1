#pragma once

#include <memory>
#include <string>
#include <vector>

namespace vmlab {

enum class ScheduleFamily { power, constant, zero, table };
enum class Integrability { integrable, non_integrable, unknown };

std::string to_string(ScheduleFamily f);
std::string to_string(Integrability i);

/// Time-varying coefficient eps(t) or alpha(t) on t >= 0.
///
/// power:    c0 / (t + 1)^a
/// constant: c0
/// zero:     0
/// table:    piecewise-linear interpolation of (t_i, v_i), held constant
///           past the last node; only order 0 is available.
class Schedule {
 public:
  static Schedule power(double c0, double a);
  static Schedule constant(double c0);
  static Schedule zero();
  static Schedule table(std::vector<double> times, std::vector<double> values);

  /// k-th derivative at t, k in [0, 3].
  double eval(double t, int order = 0) const;
  double operator()(double t) const { return eval(t, 0); }

  ScheduleFamily family() const { return family_; }
  double c0() const { return c0_; }
  double exponent() const { return a_; }
  Integrability integrability() const;
  bool has_derivatives() const { return family_ != ScheduleFamily::table; }
  /// Power, constant and zero families are all c0 (t+1)^{-a} with a >= 0.
  bool is_power_like() const { return family_ != ScheduleFamily::table; }

  /// Slope estimate usable for every family: analytic derivative when
  /// available, otherwise the slope of the table segment containing t.
  double slope(double t) const;

  const std::vector<double>& table_times() const;
  const std::vector<double>& table_values() const;

  /// Short human-readable label, e.g. "1/(t+1)^2" with c0 folded in.
  std::string label() const;

 private:
  struct Table {
    std::vector<double> t, v;
  };

  Schedule(ScheduleFamily f, double c0, double a) : family_(f), c0_(c0), a_(a) {}

  ScheduleFamily family_;
  double c0_;
  double a_;
  std::shared_ptr<const Table> table_;
};

/// eps positivity floor guarding divisions by eps(t).
inline constexpr double kEpsFloor = 1e-14;

}  // namespace vmlab
