#include "vmlab/schedule.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "vmlab/error.hpp"

namespace vmlab {

std::string to_string(ScheduleFamily f) {
  switch (f) {
    case ScheduleFamily::power: return "power";
    case ScheduleFamily::constant: return "constant";
    case ScheduleFamily::zero: return "zero";
    case ScheduleFamily::table: return "table";
  }
  return "?";
}

std::string to_string(Integrability i) {
  switch (i) {
    case Integrability::integrable: return "integrable";
    case Integrability::non_integrable: return "non-integrable";
    case Integrability::unknown: return "unknown";
  }
  return "?";
}

Schedule Schedule::power(double c0, double a) {
  if (!(c0 >= 0.0) || !(a >= 0.0) || !std::isfinite(c0) || !std::isfinite(a)) {
    throw Error(Errc::invalid_spec, "power schedule needs c0 >= 0 and a >= 0");
  }
  return Schedule(ScheduleFamily::power, c0, a);
}

Schedule Schedule::constant(double c0) {
  if (!(c0 >= 0.0) || !std::isfinite(c0)) {
    throw Error(Errc::invalid_spec, "constant schedule needs c0 >= 0");
  }
  return Schedule(ScheduleFamily::constant, c0, 0.0);
}

Schedule Schedule::zero() { return Schedule(ScheduleFamily::zero, 0.0, 0.0); }

Schedule Schedule::table(std::vector<double> times, std::vector<double> values) {
  if (times.size() < 2 || times.size() != values.size()) {
    throw Error(Errc::invalid_spec, "table schedule needs >= 2 nodes and matching lengths");
  }
  if (times.front() != 0.0) throw Error(Errc::invalid_spec, "table schedule must start at t = 0");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw Error(Errc::invalid_spec, "table schedule times must be strictly increasing");
    }
  }
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(Errc::invalid_spec, "table schedule values must be finite and non-negative");
    }
  }
  Schedule s(ScheduleFamily::table, values.front(), 0.0);
  s.table_ = std::make_shared<const Table>(Table{std::move(times), std::move(values)});
  return s;
}

double Schedule::eval(double t, int order) const {
  if (!(t >= 0.0)) throw Error(Errc::invalid_argument, "schedule evaluated at negative time");
  if (order < 0 || order > 3) throw Error(Errc::invalid_argument, "schedule derivative order must be 0..3");
  switch (family_) {
    case ScheduleFamily::zero:
      return 0.0;
    case ScheduleFamily::constant:
      return order == 0 ? c0_ : 0.0;
    case ScheduleFamily::power: {
      // d^k/dt^k (t+1)^{-a} = (-a)(-a-1)...(-a-k+1) (t+1)^{-a-k}
      double coeff = c0_;
      for (int j = 0; j < order; ++j) coeff *= -a_ - j;
      if (coeff == 0.0) return 0.0;
      return coeff * std::pow(t + 1.0, -a_ - order);
    }
    case ScheduleFamily::table: {
      if (order > 0) {
        throw Error(Errc::unsupported_derivative, "table schedules only support order 0");
      }
      const auto& tt = table_->t;
      const auto& vv = table_->v;
      if (t >= tt.back()) return vv.back();
      const auto it = std::upper_bound(tt.begin(), tt.end(), t);
      const auto i = static_cast<std::size_t>(it - tt.begin()) - 1;
      const double w = (t - tt[i]) / (tt[i + 1] - tt[i]);
      return vv[i] + w * (vv[i + 1] - vv[i]);
    }
  }
  return 0.0;
}

double Schedule::slope(double t) const {
  if (family_ != ScheduleFamily::table) return eval(t, 1);
  const auto& tt = table_->t;
  const auto& vv = table_->v;
  if (t >= tt.back()) return 0.0;
  const auto it = std::upper_bound(tt.begin(), tt.end(), t);
  const auto i = static_cast<std::size_t>(it - tt.begin()) - 1;
  return (vv[i + 1] - vv[i]) / (tt[i + 1] - tt[i]);
}

Integrability Schedule::integrability() const {
  switch (family_) {
    case ScheduleFamily::zero:
      return Integrability::integrable;
    case ScheduleFamily::constant:
      return c0_ == 0.0 ? Integrability::integrable : Integrability::non_integrable;
    case ScheduleFamily::power:
      if (c0_ == 0.0) return Integrability::integrable;
      return a_ > 1.0 ? Integrability::integrable : Integrability::non_integrable;
    case ScheduleFamily::table:
      return Integrability::unknown;
  }
  return Integrability::unknown;
}

const std::vector<double>& Schedule::table_times() const {
  if (!table_) throw Error(Errc::invalid_argument, "schedule is not a table");
  return table_->t;
}

const std::vector<double>& Schedule::table_values() const {
  if (!table_) throw Error(Errc::invalid_argument, "schedule is not a table");
  return table_->v;
}

namespace {

std::string num(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string Schedule::label() const {
  switch (family_) {
    case ScheduleFamily::zero: return "0";
    case ScheduleFamily::constant: return num(c0_);
    case ScheduleFamily::power:
      if (a_ == 0.0) return num(c0_);
      return num(c0_) + "/(t+1)^" + num(a_);
    case ScheduleFamily::table: return "table[" + std::to_string(table_->t.size()) + "]";
  }
  return "?";
}

}  // namespace vmlab
