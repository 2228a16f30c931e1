#include "vmlab/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <map>
#include <thread>

#include <Eigen/Core>

#include "vmlab/assumptions.hpp"
#include "vmlab/bounds.hpp"
#include "vmlab/csv.hpp"
#include "vmlab/error.hpp"
#include "vmlab/integrator.hpp"
#include "vmlab/lg.hpp"
#include "vmlab/modes.hpp"
#include "vmlab/rates.hpp"

namespace vmlab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

template <class F>
void parallel_for(std::size_t count, int workers, F&& body) {
  const std::size_t nthreads = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, workers)));
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (std::size_t w = 0; w < nthreads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

std::string timestamp(const char* fmt) {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  localtime_r(&now, &tm);
  char buf[64];
  std::strftime(buf, sizeof buf, fmt, &tm);
  return buf;
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

bool defaulted(const ExperimentConfig& cfg, const std::string& key) { return contains(cfg.defaulted, key); }

json report_json(const AssumptionReport& r) {
  json j = {{"id", r.id}, {"holds", r.holds}, {"determined", r.determined}, {"c1", r.c1}, {"c2", r.c2},
            {"t0", r.t0}};
  if (r.id == "A4.2") j["bound"] = r.bound;
  if (r.witness) j["witness"] = *r.witness;
  if (!r.note.empty()) j["note"] = r.note;
  if (!std::isfinite(r.c2)) j["c2"] = nullptr;
  if (!std::isfinite(r.c1)) j["c1"] = nullptr;
  return j;
}

std::vector<double> spectrum_of(const QuadraticSpec& spec) {
  if (spec.spectrum()) return *spec.spectrum();
  Eigen::SelfAdjointEigenSolver<Matrix> es(spec.gram(), Eigen::EigenvaluesOnly);
  return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

// Fully resolved experiment: the config after figure presets were applied.
struct Setup {
  ExperimentConfig cfg;
  std::string tag;
  double horizon = 50.0;
  std::vector<RunSpec> runs;
  std::vector<std::string> comparisons;
  std::vector<std::string> warnings;
  std::vector<std::string> choices;
  QuadraticSpec spec = QuadraticSpec::from_spectrum({1.0});
  Objective obj;
  Vector x0, v0;
  std::vector<double> lambdas;
  std::pair<double, double> window;
  bool write_trajectories = false;
};

Setup resolve(const ExperimentConfig& in, const FigurePreset* preset, const std::string& tag) {
  Setup s;
  s.cfg = in;
  s.tag = tag;
  ExperimentConfig& c = s.cfg;
  if (preset) {
    if (c.objective.family != preset->family) {
      throw Error(Errc::config, c.source + ": figure " + preset->id + " expects objective family '" + preset->family +
                                    "', config has '" + c.objective.family + "'");
    }
    const bool dim_fixed = c.objective.spectrum || c.objective.matrix;
    if (preset->n && defaulted(c, "n") && !dim_fixed && c.x0_mode == X0Mode::signs) c.n = *preset->n;
    if (preset->kappa && !c.objective.kappa && !dim_fixed) c.objective.kappa = preset->kappa;
    if (preset->gamma && c.gamma != *preset->gamma) {
      if (!defaulted(c, "gamma")) s.warnings.push_back("gamma overridden to " + format_double(*preset->gamma));
      c.gamma = *preset->gamma;
    }
    if (preset->beta && c.beta != *preset->beta) {
      if (!defaulted(c, "beta")) s.warnings.push_back("beta overridden to " + format_double(*preset->beta));
      c.beta = *preset->beta;
    }
    if (!preset->warning.empty()) s.warnings.push_back(preset->warning);
    s.horizon = c.horizon.value_or(preset->horizon);
    s.runs = c.runs.empty() ? preset->runs : c.runs;
    s.comparisons = c.comparisons.empty() ? preset->comparisons : c.comparisons;
    s.write_trajectories = preset->write_trajectories;
  } else {
    s.horizon = c.horizon.value_or(50.0);
    s.runs = c.runs.empty() ? std::vector<RunSpec>{RunSpec{"", Schedule::power(1.0, 1.0), Schedule::zero()}} : c.runs;
    s.comparisons = c.comparisons;
    s.write_trajectories = true;
  }
  for (std::size_t i = 0; i < s.runs.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "vm%02zu", i);
    s.runs[i].id = buf;
  }
  if (!(s.horizon >= c.gamma)) throw Error(Errc::config, c.source + ": T must be at least one step");
  if (c.beta_defaulted() && !(preset && preset->beta)) {
    s.choices.push_back("beta = 1 by default; the experiment description does not fix it");
  }
  if (defaulted(c, "T")) s.choices.push_back("T = " + format_double(s.horizon) + " by default");

  // Structural checks on every schedule before anything runs.
  const auto grid = check_grid(c.gamma, s.horizon);
  std::vector<std::string> problems;
  for (const auto& r : s.runs) {
    for (const auto& p : validate_structure(r.eps, true, grid)) problems.push_back(r.id + " eps: " + p);
    for (const auto& p : validate_structure(r.alpha, false, grid)) problems.push_back(r.id + " alpha: " + p);
  }
  if (!problems.empty()) {
    std::string msg = c.source + ": invalid schedules:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw Error(Errc::config, msg);
  }

  try {
    s.spec = build_spec(c);
    s.obj = build_objective(c, s.spec);
  } catch (const Error& e) {
    throw Error(Errc::config, c.source + ": " + e.what());
  }
  for (const auto& w : s.obj.warnings) s.warnings.push_back(w);
  s.lambdas = spectrum_of(s.spec);
  s.x0 = make_x0(c.x0_mode, c.n, c.seed, c.x0_values);
  s.v0 = c.v0.empty() ? Vector(Vector::Zero(c.n)) : Vector(Eigen::Map<const Vector>(c.v0.data(), c.n));
  s.window = c.rate_window.value_or(default_rate_window(s.horizon));
  if (c.lg_modes.empty()) c.lg_modes = {c.n - 1};
  for (int m : c.lg_modes) {
    if (m >= c.n) throw Error(Errc::config, c.source + ": lg mode index out of range");
  }
  return s;
}

json resolved_echo(const Setup& s) {
  json j = config_echo(s.cfg);
  j["T"] = s.horizon;
  j["comparisons"] = s.comparisons;
  json runs = json::array();
  for (const auto& r : s.runs) {
    runs.push_back({{"id", r.id}, {"eps", schedule_to_json(r.eps)}, {"alpha", schedule_to_json(r.alpha)}});
  }
  j["runs"] = runs;
  return j;
}

// Assumption reports of one (eps, alpha) pair, plus the subset that blocks
// the requested comparisons.
struct RunAssumptions {
  json reports = json::array();
  std::vector<std::string> blocking;
};

RunAssumptions assess(const Setup& s, const RunSpec& r) {
  RunAssumptions out;
  const auto grid = check_grid(s.cfg.gamma, s.horizon);
  const bool quad = s.obj.is_quadratic;
  auto add = [&](const AssumptionReport& rep, bool relevant, const std::string& why) {
    json j = report_json(rep);
    out.reports.push_back(j);
    if (relevant && !(rep.determined && rep.holds)) out.blocking.push_back(rep.id + " fails (" + why + ")");
  };
  try {
    add(check_a31(r.eps, r.alpha, grid), false, "");
  } catch (const Error& e) {
    out.reports.push_back({{"id", "A3.1"}, {"holds", false}, {"note", e.what()}});
  }
  try {
    add(check_a35(r.eps, r.alpha, grid), contains(s.comparisons, "bounds"), "bound envelopes requested");
  } catch (const Error& e) {
    out.reports.push_back({{"id", "A3.5"}, {"holds", false}, {"note", e.what()}});
    if (contains(s.comparisons, "bounds")) out.blocking.push_back(std::string("A3.5: ") + e.what());
  }
  if (quad) {
    const bool lg = contains(s.comparisons, "lg");
    for (int m : s.cfg.lg_modes) {
      const double lam = s.lambdas[static_cast<std::size_t>(m)];
      AssumptionReport rep = check_a42(r.eps, r.alpha, lam, s.cfg.beta, grid);
      json j = report_json(rep);
      j["mode"] = m;
      j["lambda"] = lam;
      out.reports.push_back(j);
      if (lg && !rep.holds) out.blocking.push_back("A4.2 fails for mode " + std::to_string(m));
    }
    const AssumptionReport a46 = check_a46(r.eps, r.alpha);
    add(a46, lg || contains(s.comparisons, "classify"), "rate classification requested");
  }
  return out;
}

struct RunResult {
  std::optional<Trajectory> traj;
  std::string status = "ok";
  std::string error;
  std::optional<long> failed_step;
  double wall = 0.0;
};

RunResult timed_integrate(const Setup& s, Scheme scheme, const Schedule& eps, const Schedule& alpha) {
  RunResult res;
  SolverConfig sc;
  sc.gamma = s.cfg.gamma;
  sc.beta = s.cfg.beta;
  sc.horizon = s.horizon;
  sc.x0 = s.x0;
  sc.v0 = s.v0;
  sc.scheme = scheme;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    res.traj = integrate(s.obj, eps, alpha, sc);
  } catch (const Error& e) {
    res.status = e.code() == Errc::divergence ? "diverged" : "failed";
    res.error = e.what();
    res.failed_step = e.index();
  }
  res.wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

CsvTable series_table(const std::vector<double>& t, const std::vector<double>& d) {
  CsvTable tab({"t", "distance"});
  for (std::size_t k = 0; k < t.size(); ++k) tab.add_row({t[k], d[k]});
  return tab;
}

std::vector<double> distance_to_opt(const Trajectory& traj, const Objective& obj) {
  const Vector xs = obj.minimizer ? *obj.minimizer : Vector(Vector::Zero(traj.dimension()));
  std::vector<double> d(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) d[k] = (traj.states[k] - xs).norm();
  return d;
}

CsvTable trajectory_table(const Trajectory& traj) {
  std::vector<std::string> header{"t"};
  for (int i = 0; i < traj.dimension(); ++i) header.push_back("x_" + std::to_string(i));
  CsvTable tab(header);
  std::vector<double> row(header.size());
  for (std::size_t k = 0; k < traj.size(); ++k) {
    row[0] = traj.times[k];
    for (int i = 0; i < traj.dimension(); ++i) row[static_cast<std::size_t>(i) + 1] = traj.states[k](i);
    tab.add_row(row);
  }
  return tab;
}

CsvTable diagnostic_table(const Trajectory& traj, const Schedule& eps, const Objective& obj) {
  const auto U = lyapunov_series(traj, traj.scheme == Scheme::vm ? eps : Schedule::zero(), obj);
  const auto d = distance_to_opt(traj, obj);
  CsvTable tab({"t", "U", "grad_norm", "dist_to_opt"});
  for (std::size_t k = 0; k < traj.size(); ++k) {
    tab.add_row({traj.times[k], U[k], obj.grad(traj.states[k]).norm(), d[k]});
  }
  return tab;
}

std::optional<double> fitted_slope(const std::vector<double>& t, const std::vector<double>& d,
                                   std::pair<double, double> w, json& note) {
  try {
    const DecayFit f = estimate_decay_rate(t, d, w.first, w.second);
    note = {{"slope", f.slope}, {"t_begin", f.t_begin}, {"t_end", f.t_end}, {"points", f.points}, {"shrunk", f.shrunk}};
    return f.slope;
  } catch (const Error& e) {
    note = {{"slope", nullptr}, {"error", e.what()}};
    return std::nullopt;
  }
}

json rate_class_json(const RateClass& rc) {
  return {{"target", to_string(rc.target)}, {"verdict", to_string(rc.verdict)}, {"rationale", rc.rationale}};
}

json classification_json(const RateClassification& c) {
  json j = {{"vs_cn", rate_class_json(c.vs_cn)},
            {"vs_lm", rate_class_json(c.vs_lm)},
            {"dominance", to_string(c.dominance)},
            {"assumptions_hold", c.assumptions_hold}};
  if (c.vs_cn_if_eps_dominant) j["vs_cn_if_eps_dominant"] = rate_class_json(*c.vs_cn_if_eps_dominant);
  if (c.vs_cn_if_alpha_dominant) j["vs_cn_if_alpha_dominant"] = rate_class_json(*c.vs_cn_if_alpha_dominant);
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

// Measured verdicts are compared with the prediction; undetermined
// predictions never count as agreement.
json measured_json(std::optional<double> vm, std::optional<double> ref, Verdict predicted) {
  json j;
  if (!vm || !ref) {
    j = {{"verdict", "unavailable"}, {"agrees", nullptr}};
    return j;
  }
  const Verdict v = compare_slopes(*vm, *ref);
  j = {{"verdict", to_string(v)}, {"slope_difference", *vm - *ref}};
  j["agrees"] = predicted == Verdict::undetermined ? json(nullptr) : json(v == predicted);
  return j;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(Errc::io, "cannot open " + path.string() + " for writing");
  os << j.dump(2) << '\n';
}

json manifest_header(const Setup& s, const std::string& command) {
  json doc;
  doc["tool"] = "vmlab";
  doc["version"] = kVersion;
  doc["versions"] = {{"vmlab", kVersion},
                     {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                   std::to_string(EIGEN_MINOR_VERSION)},
                     {"json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
  doc["command"] = command;
  doc["created"] = timestamp("%Y-%m-%dT%H:%M:%S");
  doc["config_source"] = s.cfg.source;
  doc["config_hash"] = fnv1a_hex(s.cfg.raw_text);
  const json echo = resolved_echo(s);
  doc["resolved_hash"] = fnv1a_hex(echo.dump());
  doc["config"] = echo;
  doc["choices"] = s.choices;
  doc["warnings"] = s.warnings;
  doc["rate_window"] = {s.window.first, s.window.second};
  doc["objective"] = {{"name", s.obj.name}, {"dimension", s.obj.dimension}, {"lambda_min", s.spec.lambda_min()},
                      {"lambda_max", *std::max_element(s.lambdas.begin(), s.lambdas.end())}};
  return doc;
}

fs::path prepare_root(const Setup& s, const RunOptions& opts) {
  if (opts.out) {
    fs::create_directories(*opts.out);
    return *opts.out;
  }
  return make_run_dir(s.cfg.output_dir, s.tag);
}

json result_json(const std::string& id, const std::string& scheme, const RunResult& r) {
  json j = {{"id", id}, {"scheme", scheme}, {"status", r.status}, {"wall_time_s", r.wall}, {"files", json::object()}};
  if (!r.error.empty()) j["error"] = r.error;
  if (r.failed_step) j["failed_step"] = *r.failed_step;
  return j;
}

}  // namespace

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids = {"fig1_right", "fig2", "fig3", "fig4", "fig5", "fig6"};
  return ids;
}

std::pair<double, double> default_rate_window(double horizon) { return {horizon / 20.0, horizon / 5.0}; }

FigurePreset figure_preset(const std::string& id) {
  FigurePreset p;
  p.id = id;
  const std::vector<std::string> full = {"vs_cn", "vs_lm", "to_opt"};
  auto sweep = [] {
    std::vector<RunSpec> runs;
    for (double a_alpha : {1.0, 2.0}) {
      runs.push_back({"", Schedule::constant(1.0), Schedule::power(1.0, a_alpha)});
      for (double a_eps : {1.0, 2.0, 3.0}) {
        runs.push_back({"", Schedule::power(1.0, a_eps), Schedule::power(1.0, a_alpha)});
      }
    }
    return runs;
  };
  auto rate_pairs = [](double eps0) {
    return std::vector<RunSpec>{
        {"", Schedule::power(eps0, 1.0), Schedule::zero()},
        {"", Schedule::power(eps0, 1.0), Schedule::power(1.0, 2.0)},
        {"", Schedule::power(eps0, 2.0), Schedule::power(1.0, 3.0)},
        {"", Schedule::power(eps0, 3.0), Schedule::power(1.0, 1.0)},
        {"", Schedule::power(eps0, 2.0), Schedule::power(1.0, 1.0)},
        {"", Schedule::power(eps0, 3.0), Schedule::power(1.0, 2.0)},
    };
  };
  if (id == "fig1_right") {
    p.family = "quadratic";
    p.horizon = 20.0;
    p.n = 2;
    p.kappa = 100.0;
    for (double e0 : {1.0, 0.1, 0.01}) p.runs.push_back({"", Schedule::power(e0, 2.0), Schedule::zero()});
    p.comparisons = {"vs_cn", "to_opt"};
    p.write_trajectories = true;
  } else if (id == "fig2" || id == "fig3" || id == "fig4") {
    p.family = id == "fig2" ? "gauss_quad" : id == "fig3" ? "logsumexp_quad" : "poly50_quad";
    p.horizon = 50.0;
    p.runs = sweep();
    p.comparisons = full;
    if (id == "fig4") p.comparisons.push_back("bounds");
  } else if (id == "fig5") {
    p.family = "quadratic";
    p.horizon = 200.0;
    p.runs = rate_pairs(1.0);
    p.comparisons = {"vs_cn", "vs_lm", "to_opt", "lg", "classify"};
  } else if (id == "fig6") {
    p.family = "quadratic";
    p.horizon = 200.0;
    p.runs = rate_pairs(1.0);
    for (const auto& r : rate_pairs(0.01)) p.runs.push_back(r);
    p.comparisons = {"vs_cn", "vs_lm", "to_opt", "classify"};
    p.gamma = 1.0;
    p.beta = 1.0;
    p.warning =
        "OUT OF THEORY: gamma = beta = 1 is a large-step regime not covered by the continuous-time results; "
        "outputs are unvalidated";
  } else {
    throw Error(Errc::config, "unknown figure id '" + id + "' (expected fig1_right, fig2..fig6)");
  }
  return p;
}

int worker_cap(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("VMLAB_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

fs::path make_run_dir(const fs::path& base, const std::string& tag) {
  fs::create_directories(base);
  const std::string stem = tag + "_" + timestamp("%Y%m%d-%H%M%S");
  fs::path dir = base / stem;
  for (int i = 2; !fs::create_directory(dir); ++i) dir = base / (stem + "_" + std::to_string(i));
  return dir;
}

std::vector<std::string> RunManifest::files() const {
  std::vector<std::string> out;
  for (const char* section : {"references", "runs"}) {
    if (!doc.contains(section)) continue;
    for (const auto& r : doc[section]) {
      if (!r.contains("files")) continue;
      for (auto it = r["files"].begin(); it != r["files"].end(); ++it) out.push_back(it.value().get<std::string>());
    }
  }
  return out;
}

void RunManifest::write() const { write_json(path(), doc); }

RunManifest RunManifest::load(const fs::path& manifest_path) {
  std::ifstream is(manifest_path);
  if (!is) throw Error(Errc::io, "cannot read manifest " + manifest_path.string());
  RunManifest m;
  m.root = manifest_path.parent_path();
  try {
    is >> m.doc;
  } catch (const json::exception& e) {
    throw Error(Errc::io, "malformed manifest " + manifest_path.string() + ": " + e.what());
  }
  return m;
}

std::vector<std::string> verify_manifest(const RunManifest& manifest) {
  std::vector<std::string> problems;
  for (const auto& f : manifest.files()) {
    const fs::path p = manifest.root / f;
    std::error_code ec;
    if (!fs::exists(p, ec)) problems.push_back("missing file: " + f);
    else if (fs::file_size(p, ec) == 0) problems.push_back("empty file: " + f);
  }
  if (!manifest.doc.contains("runs")) return problems;
  const json& cfg = manifest.doc["config"];
  const auto comps = cfg.value("comparisons", std::vector<std::string>{});
  for (const auto& r : manifest.doc["runs"]) {
    if (r.value("status", "") != "ok") continue;
    const json& files = r["files"];
    const json skipped = r.value("skipped", json::object());
    for (const auto& c : comps) {
      if (c == "lg") {
        std::size_t count = 0;
        for (auto it = files.begin(); it != files.end(); ++it) count += it.key().rfind("lg_mode", 0) == 0;
        const std::size_t expected = cfg["lg_modes"].size() - (skipped.contains("lg") ? skipped["lg"].size() : 0);
        if (count != expected) problems.push_back(r["id"].get<std::string>() + ": lg CSV count mismatch");
        continue;
      }
      if (c == "bounds") {
        for (const char* target : {"vs_cn", "vs_lm"}) {
          if (!contains(comps, target)) continue;
          const std::string key = std::string("bounds_") + target;
          if (!files.contains(key) && !skipped.contains(key)) {
            problems.push_back(r["id"].get<std::string>() + ": missing " + key);
          }
        }
        continue;
      }
      if (!files.contains(c) && !skipped.contains(c)) {
        problems.push_back(r["id"].get<std::string>() + ": missing " + c + " output");
      }
    }
  }
  return problems;
}

json validate_report(const ExperimentConfig& cfg) {
  const Setup s = resolve(cfg, nullptr, "validate");
  json out = {{"config", s.cfg.source}, {"runs", json::array()}};
  Setup wide = s;
  wide.comparisons = {"bounds", "lg", "classify"};
  bool all_hold = true;
  for (const auto& r : s.runs) {
    const RunAssumptions a = assess(wide, r);
    all_hold = all_hold && a.blocking.empty();
    out["runs"].push_back({{"id", r.id},
                           {"eps", schedule_to_json(r.eps)},
                           {"alpha", schedule_to_json(r.alpha)},
                           {"assumptions", a.reports},
                           {"violations", a.blocking}});
  }
  out["all_hold"] = all_hold;
  return out;
}

json classify_report(const ExperimentConfig& cfg) {
  const Setup s = resolve(cfg, nullptr, "classify");
  json out = {{"config", s.cfg.source}, {"horizon", s.horizon}, {"runs", json::array()}};
  for (const auto& r : s.runs) {
    json j = {{"id", r.id}, {"eps", r.eps.label()}, {"alpha", r.alpha.label()}};
    j["classification"] = classification_json(classify_rates(r.eps, r.alpha, s.horizon));
    out["runs"].push_back(j);
  }
  return out;
}

RunManifest run_integrate(const ExperimentConfig& cfg, const RunOptions& opts) {
  const Setup s = resolve(cfg, nullptr, "integrate");
  RunManifest m;
  m.root = prepare_root(s, opts);
  m.doc = manifest_header(s, "integrate");
  std::vector<json> entries(s.runs.size());
  parallel_for(s.runs.size(), worker_cap(opts.workers), [&](std::size_t i) {
    const RunSpec& r = s.runs[i];
    const RunResult res = timed_integrate(s, s.cfg.scheme, r.eps, r.alpha);
    json j = result_json(r.id, to_string(s.cfg.scheme), res);
    j["eps"] = schedule_to_json(r.eps);
    j["alpha"] = schedule_to_json(r.alpha);
    if (res.traj) {
      const std::string traj = "traj_" + r.id + ".csv", diag = "diag_" + r.id + ".csv";
      trajectory_table(*res.traj).write(m.root / traj);
      diagnostic_table(*res.traj, r.eps, s.obj).write(m.root / diag);
      j["files"] = {{"traj", traj}, {"diag", diag}};
    }
    entries[i] = std::move(j);
  });
  m.doc["references"] = json::array();
  m.doc["runs"] = entries;
  bool failed = false;
  for (const auto& e : entries) failed = failed || e["status"] != "ok";
  m.doc["status"] = failed ? "partial" : "ok";
  m.exit_code = failed ? kExitDivergence : kExitOk;
  m.write();
  return m;
}

RunManifest run_figure(const ExperimentConfig& cfg, const std::string& figure, const RunOptions& opts) {
  const FigurePreset preset = figure_preset(figure);
  const Setup s = resolve(cfg, &preset, figure);
  const auto& comps = s.comparisons;
  const int workers = worker_cap(opts.workers);

  // Assumption reports come first; strict mode stops before any run.
  std::vector<RunAssumptions> assumptions;
  bool blocked = false;
  for (const auto& r : s.runs) {
    assumptions.push_back(assess(s, r));
    blocked = blocked || !assumptions.back().blocking.empty();
  }

  RunManifest m;
  m.root = prepare_root(s, opts);
  m.doc = manifest_header(s, "figure");
  m.doc["figure"] = figure;

  if (blocked && s.cfg.strict) {
    json runs = json::array();
    for (std::size_t i = 0; i < s.runs.size(); ++i) {
      runs.push_back({{"id", s.runs[i].id},
                      {"status", "not_run"},
                      {"files", json::object()},
                      {"assumptions", assumptions[i].reports},
                      {"violations", assumptions[i].blocking}});
    }
    m.doc["references"] = json::array();
    m.doc["runs"] = runs;
    m.doc["status"] = "assumption_violated";
    m.exit_code = kExitAssumption;
    m.write();
    return m;
  }

  // References: CN once, LM once per distinct alpha.
  std::vector<std::string> lm_keys;
  std::vector<Schedule> lm_alphas;
  std::vector<std::size_t> lm_of_run;
  for (const auto& r : s.runs) {
    const std::string key = schedule_to_json(r.alpha).dump();
    auto it = std::find(lm_keys.begin(), lm_keys.end(), key);
    if (it == lm_keys.end()) {
      lm_keys.push_back(key);
      lm_alphas.push_back(r.alpha);
      it = lm_keys.end() - 1;
    }
    lm_of_run.push_back(static_cast<std::size_t>(it - lm_keys.begin()));
  }
  auto lm_id = [](std::size_t k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "lm%02zu", k);
    return std::string(buf);
  };

  const std::size_t nref = 1 + lm_alphas.size();
  std::vector<RunResult> results(nref + s.runs.size());
  parallel_for(results.size(), workers, [&](std::size_t i) {
    if (i == 0) results[i] = timed_integrate(s, Scheme::cn, Schedule::zero(), Schedule::zero());
    else if (i < nref) results[i] = timed_integrate(s, Scheme::lm, Schedule::zero(), lm_alphas[i - 1]);
    else results[i] = timed_integrate(s, Scheme::vm, s.runs[i - nref].eps, s.runs[i - nref].alpha);
  });

  std::vector<json> refs(nref);
  std::vector<std::vector<double>> ref_to_opt(nref);
  std::vector<std::optional<double>> ref_slope(nref);
  for (std::size_t i = 0; i < nref; ++i) {
    const std::string id = i == 0 ? "cn" : lm_id(i - 1);
    refs[i] = result_json(id, i == 0 ? "cn" : "lm", results[i]);
    if (i > 0) refs[i]["alpha"] = schedule_to_json(lm_alphas[i - 1]);
    if (!results[i].traj) continue;
    const Trajectory& tr = *results[i].traj;
    ref_to_opt[i] = distance_to_opt(tr, s.obj);
    json note;
    ref_slope[i] = fitted_slope(tr.times, ref_to_opt[i], s.window, note);
    refs[i]["rate"] = note;
    if (contains(comps, "to_opt")) {
      const std::string f = "to_opt_" + id + ".csv";
      series_table(tr.times, ref_to_opt[i]).write(m.root / f);
      refs[i]["files"]["to_opt"] = f;
    }
    if (s.write_trajectories) {
      const std::string f = "traj_" + id + ".csv";
      trajectory_table(tr).write(m.root / f);
      refs[i]["files"]["traj"] = f;
    }
  }

  std::optional<ModeDecomposition> modes;
  if (s.obj.is_quadratic && contains(comps, "lg")) {
    modes = eigenmodes(s.spec, s.cfg.beta, Schedule::zero(), Schedule::zero(), s.x0, s.v0);
  }

  std::vector<json> entries(s.runs.size());
  parallel_for(s.runs.size(), workers, [&](std::size_t i) {
    const RunSpec& r = s.runs[i];
    const RunResult& res = results[nref + i];
    const std::size_t lm_ref = 1 + lm_of_run[i];
    json j = result_json(r.id, "vm", res);
    j["eps"] = schedule_to_json(r.eps);
    j["alpha"] = schedule_to_json(r.alpha);
    j["label"] = "eps=" + r.eps.label() + ", alpha=" + r.alpha.label();
    j["lm_ref"] = lm_id(lm_ref - 1);
    j["assumptions"] = assumptions[i].reports;
    if (!assumptions[i].blocking.empty()) j["violations"] = assumptions[i].blocking;
    json skipped = json::object();
    if (!res.traj) {
      entries[i] = std::move(j);
      return;
    }
    const Trajectory& tr = *res.traj;
    const Trajectory* cn = results[0].traj ? &*results[0].traj : nullptr;
    const Trajectory* lm = results[lm_ref].traj ? &*results[lm_ref].traj : nullptr;
    auto& files = j["files"];

    const auto to_opt = distance_to_opt(tr, s.obj);
    if (contains(comps, "to_opt")) {
      const std::string f = "to_opt_" + r.id + ".csv";
      series_table(tr.times, to_opt).write(m.root / f);
      files["to_opt"] = f;
    }
    if (s.write_trajectories) {
      const std::string f = "traj_" + r.id + ".csv";
      trajectory_table(tr).write(m.root / f);
      files["traj"] = f;
    }

    std::map<std::string, std::vector<double>> dist;
    for (const auto& [name, ref] : {std::pair{std::string("vs_cn"), cn}, std::pair{std::string("vs_lm"), lm}}) {
      if (!contains(comps, name)) continue;
      if (!ref) {
        skipped[name] = "reference run failed";
        continue;
      }
      dist[name] = distance_series(tr, *ref);
      const std::string f = name + "_" + r.id + ".csv";
      series_table(tr.times, dist[name]).write(m.root / f);
      files[name] = f;
    }

    if (contains(comps, "bounds")) {
      for (const auto& [name, d] : dist) {
        const std::string key = "bounds_" + name;
        try {
          const BoundKind kind = name == "vs_cn" ? BoundKind::t36_n : BoundKind::t36_lm;
          BoundEnvelope env =
              envelope_t36_shape(r.eps, r.alpha, s.cfg.beta, tr.times, kind, QuadratureRule::adaptive(1e-10));
          const double C = fit_constant(d, env.values);
          CsvTable tab({"t", "distance", "envelope", "ratio"});
          for (std::size_t k = 0; k < d.size(); ++k) {
            const double e = C * env.values[k];
            tab.add_row({tr.times[k], d[k], e, e > 0.0 ? d[k] / e : 0.0});
          }
          const std::string f = key + "_" + r.id + ".csv";
          const std::string meta = key + "_" + r.id + ".json";
          tab.write(m.root / f);
          json side = {{"kind", to_string(kind)},
                       {"C", C},
                       {"shape", "exp(-t/beta) + sqrt(eps) + alpha + int_0^t exp((s-t)/beta)(sqrt(eps)+alpha) ds"},
                       {"beta", s.cfg.beta},
                       {"gamma", s.cfg.gamma},
                       {"eps", schedule_to_json(r.eps)},
                       {"alpha", schedule_to_json(r.alpha)},
                       {"assumptions", assumptions[i].reports}};
          write_json(m.root / meta, side);
          files[key] = f;
          files[key + "_meta"] = meta;
        } catch (const Error& e) {
          skipped[key] = e.what();
        }
      }
    }

    if (modes && contains(comps, "lg")) {
      json lg_skipped = json::array();
      for (int mi : s.cfg.lg_modes) {
        ScalarMode mode = modes->modes[static_cast<std::size_t>(mi)];
        mode.eps = r.eps;
        mode.alpha = r.alpha;
        const auto grid = check_grid(s.cfg.gamma, s.horizon);
        try {
          if (!r.eps.has_derivatives() || !r.alpha.has_derivatives()) {
            throw Error(Errc::unsupported_derivative, "table schedules have no derivatives");
          }
          if (!check_a42(r.eps, r.alpha, mode.lambda, mode.beta, grid).holds) {
            throw Error(Errc::assumption_violated, "A4.2 fails for this mode");
          }
          LGOptions lo;
          lo.t_max = s.horizon;
          const LGApprox approx = fit_ab(mode, lo);
          CsvTable tab({"t", "x_vm", "x_cn", "x_lm", "x_lg", "lg_lower", "lg_upper"});
          for (std::size_t k = 0; k < tr.size(); ++k) {
            const double t = tr.times[k];
            const double xv = modes->Q.col(mi).dot(tr.states[k]);
            const LGValue v = lg_solution(approx, t);
            tab.add_row({t, xv, closed_form_cn(mode.x0, mode.beta, t), closed_form_lm(mode, t), v.value, v.lower,
                         v.upper});
          }
          char buf[32];
          std::snprintf(buf, sizeof buf, "lg_mode%03d", mi);
          const std::string f = std::string(buf) + "_" + r.id + ".csv";
          tab.write(m.root / f);
          files[buf] = f;
        } catch (const Error& e) {
          lg_skipped.push_back({{"mode", mi}, {"reason", e.what()}});
        }
      }
      if (!lg_skipped.empty()) skipped["lg"] = lg_skipped;
    }

    json rate_vm;
    const auto vm_slope = fitted_slope(tr.times, to_opt, s.window, rate_vm);
    j["rate"] = rate_vm;
    if (contains(comps, "classify")) {
      const RateClassification pred = classify_rates(r.eps, r.alpha, s.horizon);
      json cj = {{"id", r.id},
                 {"eps", schedule_to_json(r.eps)},
                 {"alpha", schedule_to_json(r.alpha)},
                 {"label", j["label"]},
                 {"predicted", classification_json(pred)},
                 {"window", {s.window.first, s.window.second}},
                 {"slope_vm", rate_vm["slope"]},
                 {"slope_cn", ref_slope[0] ? json(*ref_slope[0]) : json(nullptr)},
                 {"slope_lm", ref_slope[lm_ref] ? json(*ref_slope[lm_ref]) : json(nullptr)},
                 {"measured_vs_cn", measured_json(vm_slope, ref_slope[0], pred.vs_cn.verdict)},
                 {"measured_vs_lm", measured_json(vm_slope, ref_slope[lm_ref], pred.vs_lm.verdict)}};
      const std::string f = "classify_" + r.id + ".json";
      write_json(m.root / f, cj);
      files["classify"] = f;
    }
    if (!skipped.empty()) j["skipped"] = skipped;
    entries[i] = std::move(j);
  });

  m.doc["references"] = refs;
  m.doc["runs"] = entries;
  bool failed = false;
  for (const auto& r : refs) failed = failed || r["status"] != "ok";
  for (const auto& r : entries) failed = failed || r["status"] != "ok";
  m.doc["status"] = failed ? "partial" : "ok";
  m.exit_code = failed ? kExitDivergence : kExitOk;
  m.write();
  return m;
}

json report_rates(const RunManifest& manifest) {
  const json& doc = manifest.doc;
  if (!doc.contains("runs")) throw Error(Errc::io, "manifest has no runs");
  std::pair<double, double> window{0.0, 0.0};
  if (doc.contains("rate_window") && doc["rate_window"].size() == 2) {
    window = {doc["rate_window"][0].get<double>(), doc["rate_window"][1].get<double>()};
  } else {
    window = default_rate_window(doc["config"].value("T", 50.0));
  }
  const double horizon = doc["config"].value("T", 50.0);
  json out = {{"manifest", manifest.path().string()}, {"window", {window.first, window.second}}};

  std::map<std::string, std::optional<double>> slopes;
  auto fit_entry = [&](const json& r) {
    json e = {{"id", r["id"]}, {"scheme", r.value("scheme", "")}};
    if (r.value("status", "") != "ok") {
      e["error"] = "run " + r.value("status", std::string("failed"));
      slopes[r["id"].get<std::string>()] = std::nullopt;
      return e;
    }
    const json files = r.value("files", json::object());
    if (!files.contains("to_opt")) {
      e["error"] = "no to_opt CSV";
      slopes[r["id"].get<std::string>()] = std::nullopt;
      return e;
    }
    const CsvTable tab = read_csv(manifest.root / files["to_opt"].get<std::string>());
    std::vector<double> t, d;
    for (const auto& row : tab.data()) {
      t.push_back(row[0]);
      d.push_back(row[1]);
    }
    json note;
    slopes[r["id"].get<std::string>()] = fitted_slope(t, d, window, note);
    e.update(note);
    if (note.value("shrunk", false)) e["note"] = "window shrunk: series underflowed";
    return e;
  };

  json refs = json::array();
  for (const auto& r : doc.value("references", json::array())) refs.push_back(fit_entry(r));
  json runs = json::array();
  for (const auto& r : doc["runs"]) {
    json e = fit_entry(r);
    if (r.contains("eps") && r.contains("alpha")) {
      const Schedule eps = schedule_from_json(r["eps"]);
      const Schedule alpha = schedule_from_json(r["alpha"]);
      const RateClassification pred = classify_rates(eps, alpha, horizon);
      e["label"] = r.value("label", "");
      e["predicted"] = classification_json(pred);
      const auto vm = slopes[r["id"].get<std::string>()];
      if (slopes.count("cn")) e["measured_vs_cn"] = measured_json(vm, slopes["cn"], pred.vs_cn.verdict);
      const std::string lm = r.value("lm_ref", "");
      if (!lm.empty() && slopes.count(lm)) e["measured_vs_lm"] = measured_json(vm, slopes[lm], pred.vs_lm.verdict);
    }
    runs.push_back(e);
  }
  out["references"] = refs;
  out["runs"] = runs;
  return out;
}

}  // namespace vmlab
