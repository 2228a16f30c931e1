#include "vmlab/rates.hpp"

#include <cmath>
#include <vector>

#include "vmlab/assumptions.hpp"
#include "vmlab/error.hpp"

namespace vmlab {

std::string to_string(RateTarget t) { return t == RateTarget::cn ? "CN" : "LM"; }

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::faster: return "faster";
    case Verdict::as_fast: return "as-fast";
    case Verdict::slower: return "slower";
    case Verdict::undetermined: return "undetermined";
  }
  return "?";
}

std::string to_string(Dominance d) {
  switch (d) {
    case Dominance::eps: return "eps>alpha";
    case Dominance::alpha: return "alpha>eps";
    case Dominance::ambiguous: return "ambiguous";
  }
  return "?";
}

Dominance tail_dominance(const Schedule& eps, const Schedule& alpha, double horizon, int samples) {
  if (samples < 2 || !(horizon > 0.0)) throw Error(Errc::invalid_argument, "tail_dominance: bad tail grid");
  int eps_wins = 0, alpha_wins = 0;
  for (int i = 0; i < samples; ++i) {
    const double t = horizon / 2.0 + (horizon / 2.0) * i / (samples - 1);
    const double e = eps(t), a = alpha(t);
    if (e > a) ++eps_wins;
    if (a > e) ++alpha_wins;
  }
  if (eps_wins > alpha_wins) return Dominance::eps;
  if (alpha_wins > eps_wins) return Dominance::alpha;
  return Dominance::ambiguous;
}

namespace {

RateClass by_integrability(RateTarget target, Integrability which, const std::string& name, Verdict if_non_integrable,
                           const std::string& branch) {
  RateClass rc;
  rc.target = target;
  switch (which) {
    case Integrability::non_integrable:
      rc.verdict = if_non_integrable;
      rc.rationale = branch + ": " + name + " is non-integrable";
      break;
    case Integrability::integrable:
      rc.verdict = Verdict::as_fast;
      rc.rationale = branch + ": " + name + " is integrable";
      break;
    case Integrability::unknown:
      rc.verdict = Verdict::undetermined;
      rc.rationale = branch + ": integrability of " + name + " unknown";
      break;
  }
  return rc;
}

}  // namespace

RateClassification classify_rates(const Schedule& eps, const Schedule& alpha, double horizon) {
  RateClassification out;
  const AssumptionReport a46 = check_a46(eps, alpha);
  out.assumptions_hold = a46.determined && a46.holds;
  if (!out.assumptions_hold) {
    out.note = "A46 " + std::string(a46.determined ? "fails" : "undetermined") +
               (a46.note.empty() ? "" : " (" + a46.note + ")") + "; verdicts are not backed by the analysis";
  }

  out.vs_lm = by_integrability(RateTarget::lm, eps.integrability(), "eps", Verdict::faster, "vs LM");
  out.dominance = tail_dominance(eps, alpha, horizon);

  const RateClass alpha_branch =
      by_integrability(RateTarget::cn, alpha.integrability(), "alpha", Verdict::slower, "alpha dominant");
  const RateClass eps_branch =
      by_integrability(RateTarget::cn, eps.integrability(), "eps", Verdict::faster, "eps dominant");
  switch (out.dominance) {
    case Dominance::alpha:
      out.vs_cn = alpha_branch;
      break;
    case Dominance::eps:
      out.vs_cn = eps_branch;
      break;
    case Dominance::ambiguous:
      out.vs_cn.target = RateTarget::cn;
      out.vs_cn.verdict = Verdict::undetermined;
      out.vs_cn.rationale = "ambiguous dominance on the tail";
      out.vs_cn_if_alpha_dominant = alpha_branch;
      out.vs_cn_if_eps_dominant = eps_branch;
      break;
  }
  if (!out.assumptions_hold) {
    out.vs_cn.verdict = Verdict::undetermined;
    out.vs_lm.verdict = Verdict::undetermined;
  }
  return out;
}

DecayFit estimate_decay_rate(std::span<const double> times, std::span<const double> series, double t_a, double t_b) {
  if (times.size() != series.size()) throw Error(Errc::alignment, "estimate_decay_rate: length mismatch");
  if (!(t_b > t_a)) throw Error(Errc::invalid_argument, "estimate_decay_rate: empty window");
  constexpr double kTiny = 1e-290;
  DecayFit fit;
  std::vector<double> ts, ls;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] < t_a) continue;
    if (times[k] > t_b) break;
    const double v = std::abs(series[k]);
    if (!(v > kTiny) || !std::isfinite(v)) {
      fit.shrunk = true;
      break;
    }
    ts.push_back(times[k]);
    ls.push_back(std::log(v));
  }
  if (ts.size() < 3) throw Error(Errc::underflow, "estimate_decay_rate: fewer than three usable samples in window");
  const double n = static_cast<double>(ts.size());
  double mt = 0.0, ml = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    mt += ts[i];
    ml += ls[i];
  }
  mt /= n;
  ml /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    sxx += (ts[i] - mt) * (ts[i] - mt);
    sxy += (ts[i] - mt) * (ls[i] - ml);
  }
  fit.slope = sxy / sxx;
  fit.intercept = ml - fit.slope * mt;
  fit.t_begin = ts.front();
  fit.t_end = ts.back();
  fit.points = ts.size();
  return fit;
}

Verdict compare_slopes(double vm_slope, double reference_slope, double margin) {
  const double diff = vm_slope - reference_slope;
  if (diff < -margin) return Verdict::faster;
  if (diff > margin) return Verdict::slower;
  return Verdict::as_fast;
}

}  // namespace vmlab
