#include "vmlab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "vmlab/error.hpp"

namespace vmlab {

using nlohmann::json;

namespace {

const std::set<std::string> kTopKeys = {"objective", "n",    "eps",        "alpha",   "runs",       "gamma",
                                        "beta",      "T",    "x0",         "v0",      "seed",       "output_dir",
                                        "comparisons", "strict", "lg_modes", "rate_window", "scheme"};
const std::set<std::string> kObjectiveKeys = {"family", "spectrum", "matrix", "kappa", "lambda_max"};
const std::set<std::string> kFamilies = {"quadratic", "gauss_quad", "logsumexp_quad", "poly50_quad"};

class Parser {
 public:
  Parser(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

  long line_of(const std::string& key) const {
    const auto pos = text_.find("\"" + key + "\"");
    if (pos == std::string::npos) return 0;
    return 1 + static_cast<long>(std::count(text_.begin(), text_.begin() + static_cast<long>(pos), '\n'));
  }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    const long line = line_of(key);
    throw Error(Errc::config, source_ + ":" + std::to_string(line) + ": " + msg, line);
  }

  double number(const json& j, const std::string& key) const {
    if (!j.is_number()) fail(key, "'" + key + "' must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(key, "'" + key + "' must be finite");
    return v;
  }

  double positive(const json& j, const std::string& key) const {
    const double v = number(j, key);
    if (!(v > 0.0)) fail(key, "'" + key + "' must be positive");
    return v;
  }

  std::vector<double> numbers(const json& j, const std::string& key) const {
    if (!j.is_array()) fail(key, "'" + key + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : j) out.push_back(number(v, key));
    return out;
  }

  Schedule schedule(const json& j, const std::string& key) const {
    if (!j.is_object()) fail(key, "schedule '" + key + "' must be an object");
    try {
      return schedule_from_json(j);
    } catch (const Error& e) {
      fail(key, std::string(e.what()));
    }
  }

  std::vector<Schedule> schedule_list(const json& j, const std::string& key) const {
    std::vector<Schedule> out;
    if (j.is_array()) {
      if (j.empty()) fail(key, "'" + key + "' sweep is empty");
      for (const auto& s : j) out.push_back(schedule(s, key));
    } else {
      out.push_back(schedule(j, key));
    }
    return out;
  }

 private:
  const std::string& text_;
  std::string source_;
};

void check_keys(const Parser& p, const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) p.fail(it.key(), "unknown key '" + it.key() + "' in " + where);
  }
}

}  // namespace

bool ExperimentConfig::beta_defaulted() const {
  return std::find(defaulted.begin(), defaulted.end(), "beta") != defaulted.end();
}

const std::vector<std::string>& comparison_names() {
  static const std::vector<std::string> names = {"vs_cn", "vs_lm", "to_opt", "bounds", "lg", "classify"};
  return names;
}

json schedule_to_json(const Schedule& s) {
  switch (s.family()) {
    case ScheduleFamily::power: return {{"family", "power"}, {"c0", s.c0()}, {"a", s.exponent()}};
    case ScheduleFamily::constant: return {{"family", "constant"}, {"c0", s.c0()}};
    case ScheduleFamily::zero: return {{"family", "zero"}};
    case ScheduleFamily::table: return {{"family", "table"}, {"times", s.table_times()}, {"values", s.table_values()}};
  }
  return {};
}

Schedule schedule_from_json(const json& j) {
  if (!j.is_object() || !j.contains("family") || !j["family"].is_string()) {
    throw Error(Errc::invalid_spec, "schedule needs a string 'family'");
  }
  const std::string fam = j["family"];
  auto allow = [&](std::initializer_list<const char*> keys) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it.key() == "family") continue;
      bool ok = false;
      for (const char* k : keys) ok = ok || it.key() == k;
      if (!ok) throw Error(Errc::invalid_spec, "unknown key '" + it.key() + "' for a " + fam + " schedule");
    }
  };
  auto num = [&](const char* key, double dflt) {
    if (!j.contains(key)) return dflt;
    if (!j[key].is_number()) throw Error(Errc::invalid_spec, std::string("schedule '") + key + "' must be a number");
    return j[key].get<double>();
  };
  if (fam == "power") {
    allow({"c0", "a"});
    return Schedule::power(num("c0", 1.0), num("a", 1.0));
  }
  if (fam == "constant") {
    allow({"c0"});
    return Schedule::constant(num("c0", 1.0));
  }
  if (fam == "zero") {
    allow({});
    return Schedule::zero();
  }
  if (fam == "table") {
    allow({"times", "values"});
    if (!j.contains("times") || !j.contains("values") || !j["times"].is_array() || !j["values"].is_array()) {
      throw Error(Errc::invalid_spec, "table schedule needs 'times' and 'values' arrays");
    }
    std::vector<double> t, v;
    for (const auto& x : j["times"]) {
      if (!x.is_number()) throw Error(Errc::invalid_spec, "table times must be numbers");
      t.push_back(x.get<double>());
    }
    for (const auto& x : j["values"]) {
      if (!x.is_number()) throw Error(Errc::invalid_spec, "table values must be numbers");
      v.push_back(x.get<double>());
    }
    return Schedule::table(std::move(t), std::move(v));
  }
  throw Error(Errc::invalid_spec, "unknown schedule family '" + fam + "'");
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& source) {
  ExperimentConfig cfg;
  cfg.source = source;
  cfg.raw_text = text;
  json root;
  try {
    root = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const long line = 1 + static_cast<long>(std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n'));
    throw Error(Errc::config, source + ":" + std::to_string(line) + ": malformed JSON", line);
  }
  const Parser p(cfg.raw_text, source);
  if (!root.is_object()) throw Error(Errc::config, source + ":1: top level must be an object", 1);
  check_keys(p, root, kTopKeys, "config");

  auto mark_default = [&](const char* key) {
    if (!root.contains(key)) cfg.defaulted.emplace_back(key);
    return root.contains(key);
  };

  if (!root.contains("objective")) throw Error(Errc::config, source + ":1: missing 'objective'", 1);
  const json& obj = root["objective"];
  if (obj.is_string()) {
    cfg.objective.family = obj.get<std::string>();
  } else if (obj.is_object()) {
    check_keys(p, obj, kObjectiveKeys, "objective");
    if (obj.contains("family")) {
      if (!obj["family"].is_string()) p.fail("family", "objective 'family' must be a string");
      cfg.objective.family = obj["family"];
    }
    if (obj.contains("spectrum")) cfg.objective.spectrum = p.numbers(obj["spectrum"], "spectrum");
    if (obj.contains("matrix")) {
      const json& m = obj["matrix"];
      if (!m.is_array() || m.empty()) p.fail("matrix", "'matrix' must be a non-empty array of rows");
      const auto rows = static_cast<Eigen::Index>(m.size());
      Matrix A(rows, rows);
      for (Eigen::Index i = 0; i < rows; ++i) {
        const auto row = p.numbers(m[static_cast<std::size_t>(i)], "matrix");
        if (static_cast<Eigen::Index>(row.size()) != rows) p.fail("matrix", "'matrix' must be square");
        for (Eigen::Index k = 0; k < rows; ++k) A(i, k) = row[static_cast<std::size_t>(k)];
      }
      cfg.objective.matrix = std::move(A);
    }
    if (cfg.objective.spectrum && cfg.objective.matrix) p.fail("matrix", "give either 'spectrum' or 'matrix'");
    if (obj.contains("kappa")) {
      cfg.objective.kappa = p.number(obj["kappa"], "kappa");
      if (!(*cfg.objective.kappa >= 1.0)) p.fail("kappa", "'kappa' must be >= 1");
    }
    if (obj.contains("lambda_max")) cfg.objective.lambda_max = p.positive(obj["lambda_max"], "lambda_max");
  } else {
    p.fail("objective", "'objective' must be a family name or an object");
  }
  if (!kFamilies.count(cfg.objective.family)) {
    p.fail("objective", "invalid objective family '" + cfg.objective.family +
                            "' (expected quadratic, gauss_quad, logsumexp_quad or poly50_quad)");
  }

  const int dim_from_spec = cfg.objective.spectrum ? static_cast<int>(cfg.objective.spectrum->size())
                            : cfg.objective.matrix ? static_cast<int>(cfg.objective.matrix->rows())
                                                   : 0;
  if (mark_default("n")) {
    const json& jn = root["n"];
    if (!jn.is_number_integer() || jn.get<long>() < 1) p.fail("n", "'n' must be a positive integer");
    cfg.n = jn.get<int>();
    if (dim_from_spec && dim_from_spec != cfg.n) p.fail("n", "'n' does not match the objective dimension");
  } else if (dim_from_spec) {
    cfg.n = dim_from_spec;
  }

  if (mark_default("gamma")) cfg.gamma = p.positive(root["gamma"], "gamma");
  if (mark_default("beta")) cfg.beta = p.positive(root["beta"], "beta");
  if (mark_default("T")) cfg.horizon = p.positive(root["T"], "T");
  if (mark_default("seed")) {
    if (!root["seed"].is_number_integer() || root["seed"].get<long long>() < 0) {
      p.fail("seed", "'seed' must be a non-negative integer");
    }
    cfg.seed = root["seed"].get<std::uint64_t>();
  }
  if (mark_default("output_dir")) {
    if (!root["output_dir"].is_string()) p.fail("output_dir", "'output_dir' must be a string");
    cfg.output_dir = root["output_dir"];
  }
  if (mark_default("strict")) {
    if (!root["strict"].is_boolean()) p.fail("strict", "'strict' must be a boolean");
    cfg.strict = root["strict"];
  }
  if (mark_default("scheme")) {
    const json& s = root["scheme"];
    const std::string name = s.is_string() ? s.get<std::string>() : "";
    if (name == "vm") cfg.scheme = Scheme::vm;
    else if (name == "cn") cfg.scheme = Scheme::cn;
    else if (name == "lm") cfg.scheme = Scheme::lm;
    else p.fail("scheme", "'scheme' must be one of vm, cn, lm");
  }

  if (mark_default("x0")) {
    const json& jx = root["x0"];
    if (jx.is_array()) {
      cfg.x0_mode = X0Mode::explicit_values;
      cfg.x0_values = p.numbers(jx, "x0");
    } else if (jx.is_object()) {
      check_keys(p, jx, {"mode", "values"}, "x0");
      const std::string mode = jx.value("mode", std::string("signs"));
      if (mode == "signs") {
        cfg.x0_mode = X0Mode::signs;
        if (jx.contains("values")) p.fail("values", "'values' is only valid with mode 'explicit'");
      } else if (mode == "explicit") {
        cfg.x0_mode = X0Mode::explicit_values;
        if (!jx.contains("values")) p.fail("x0", "explicit x0 needs 'values'");
        cfg.x0_values = p.numbers(jx["values"], "values");
      } else {
        p.fail("mode", "x0 mode must be 'signs' or 'explicit'");
      }
    } else {
      p.fail("x0", "'x0' must be an object or an array");
    }
    const bool n_free = !root.contains("n") && dim_from_spec == 0;
    if (cfg.x0_mode == X0Mode::explicit_values && n_free && !cfg.x0_values.empty()) {
      cfg.n = static_cast<int>(cfg.x0_values.size());
    }
    if (cfg.x0_mode == X0Mode::explicit_values && static_cast<int>(cfg.x0_values.size()) != cfg.n) {
      p.fail("x0", "explicit x0 has " + std::to_string(cfg.x0_values.size()) + " entries, expected " +
                       std::to_string(cfg.n));
    }
  }
  if (mark_default("v0")) {
    cfg.v0 = p.numbers(root["v0"], "v0");
    if (static_cast<int>(cfg.v0.size()) != cfg.n) p.fail("v0", "'v0' length does not match n");
  }

  if (root.contains("runs") && (root.contains("eps") || root.contains("alpha"))) {
    p.fail("runs", "give either 'runs' or 'eps'/'alpha' sweeps, not both");
  }
  if (root.contains("runs")) {
    const json& jr = root["runs"];
    if (!jr.is_array() || jr.empty()) p.fail("runs", "'runs' must be a non-empty array");
    for (const auto& r : jr) {
      if (!r.is_object()) p.fail("runs", "each run must be an object with 'eps' and 'alpha'");
      check_keys(p, r, {"eps", "alpha"}, "run");
      RunSpec spec;
      spec.eps = r.contains("eps") ? p.schedule(r["eps"], "eps") : Schedule::constant(1.0);
      spec.alpha = r.contains("alpha") ? p.schedule(r["alpha"], "alpha") : Schedule::zero();
      cfg.runs.push_back(std::move(spec));
    }
  } else if (root.contains("eps") || root.contains("alpha")) {
    const auto eps = root.contains("eps") ? p.schedule_list(root["eps"], "eps")
                                          : std::vector<Schedule>{Schedule::power(1.0, 1.0)};
    const auto alpha = root.contains("alpha") ? p.schedule_list(root["alpha"], "alpha")
                                              : std::vector<Schedule>{Schedule::zero()};
    for (const auto& a : alpha) {
      for (const auto& e : eps) cfg.runs.push_back(RunSpec{"", e, a});
    }
  }
  for (std::size_t i = 0; i < cfg.runs.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "vm%02zu", i);
    cfg.runs[i].id = buf;
  }

  if (root.contains("comparisons")) {
    const json& jc = root["comparisons"];
    if (!jc.is_array()) p.fail("comparisons", "'comparisons' must be an array");
    for (const auto& c : jc) {
      const std::string name = c.is_string() ? c.get<std::string>() : "";
      const auto& known = comparison_names();
      if (std::find(known.begin(), known.end(), name) == known.end()) {
        p.fail("comparisons", "unknown comparison '" + name + "'");
      }
      if (std::find(cfg.comparisons.begin(), cfg.comparisons.end(), name) == cfg.comparisons.end()) {
        cfg.comparisons.push_back(name);
      }
    }
  }
  if (root.contains("lg_modes")) {
    const json& jl = root["lg_modes"];
    if (!jl.is_array()) p.fail("lg_modes", "'lg_modes' must be an array of mode indices");
    for (const auto& m : jl) {
      if (!m.is_number_integer() || m.get<long>() < 0 || m.get<long>() >= cfg.n) {
        p.fail("lg_modes", "lg mode index out of range [0, n)");
      }
      cfg.lg_modes.push_back(m.get<int>());
    }
  }
  if (root.contains("rate_window")) {
    const auto w = p.numbers(root["rate_window"], "rate_window");
    if (w.size() != 2 || !(w[0] >= 0.0) || !(w[1] > w[0])) p.fail("rate_window", "'rate_window' must be [t_a, t_b]");
    cfg.rate_window = std::make_pair(w[0], w[1]);
  }
  return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(Errc::config, path.string() + ": cannot read config file");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

Vector make_x0(X0Mode mode, int n, std::uint64_t seed, const std::vector<double>& values) {
  if (n < 1) throw Error(Errc::invalid_argument, "make_x0 needs n >= 1");
  if (mode == X0Mode::explicit_values) {
    if (static_cast<int>(values.size()) != n) throw Error(Errc::invalid_argument, "explicit x0 has the wrong length");
    return Eigen::Map<const Vector>(values.data(), n);
  }
  std::mt19937_64 gen(seed);
  Vector x(n);
  for (int i = 0; i < n; ++i) x(i) = (gen() & 1u) ? 1.0 : -1.0;
  return x;
}

QuadraticSpec build_spec(const ExperimentConfig& cfg) {
  const auto& o = cfg.objective;
  if (o.matrix) return QuadraticSpec::from_matrix(*o.matrix);
  if (o.spectrum) return QuadraticSpec::from_spectrum(*o.spectrum);
  // gauss_quad needs lambda_min > 2 to be strongly convex everywhere.
  const bool gauss = o.family == "gauss_quad";
  const double kappa = o.kappa.value_or(gauss ? 10.0 : 100.0);
  const double lmax = o.lambda_max.value_or(gauss ? 25.0 : 10.0);
  return QuadraticSpec::log_spaced(cfg.n, kappa, lmax);
}

Objective build_objective(const ExperimentConfig& cfg, const QuadraticSpec& spec) {
  const std::string& f = cfg.objective.family;
  if (f == "quadratic") return make_quadratic(spec);
  if (f == "gauss_quad") return make_gauss_plus_quad(spec);
  if (f == "logsumexp_quad") return make_logsumexp_plus_quad(spec);
  if (f == "poly50_quad") return make_poly50_plus_quad(spec);
  throw Error(Errc::config, "invalid objective family '" + f + "'");
}

json config_echo(const ExperimentConfig& cfg) {
  json j;
  json obj = {{"family", cfg.objective.family}};
  if (cfg.objective.spectrum) obj["spectrum"] = *cfg.objective.spectrum;
  if (cfg.objective.matrix) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < cfg.objective.matrix->rows(); ++i) {
      json row = json::array();
      for (Eigen::Index k = 0; k < cfg.objective.matrix->cols(); ++k) row.push_back((*cfg.objective.matrix)(i, k));
      rows.push_back(row);
    }
    obj["matrix"] = rows;
  }
  if (cfg.objective.kappa) obj["kappa"] = *cfg.objective.kappa;
  if (cfg.objective.lambda_max) obj["lambda_max"] = *cfg.objective.lambda_max;
  j["objective"] = obj;
  j["n"] = cfg.n;
  j["gamma"] = cfg.gamma;
  j["beta"] = cfg.beta;
  j["T"] = cfg.horizon ? json(*cfg.horizon) : json(nullptr);
  j["x0"] = cfg.x0_mode == X0Mode::signs ? json{{"mode", "signs"}} : json{{"mode", "explicit"}, {"values", cfg.x0_values}};
  j["v0"] = cfg.v0;
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir;
  j["strict"] = cfg.strict;
  j["scheme"] = to_string(cfg.scheme);
  j["comparisons"] = cfg.comparisons;
  j["lg_modes"] = cfg.lg_modes;
  if (cfg.rate_window) j["rate_window"] = {cfg.rate_window->first, cfg.rate_window->second};
  json runs = json::array();
  for (const auto& r : cfg.runs) {
    runs.push_back({{"id", r.id}, {"eps", schedule_to_json(r.eps)}, {"alpha", schedule_to_json(r.alpha)}});
  }
  j["runs"] = runs;
  j["defaulted"] = cfg.defaulted;
  return j;
}

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace vmlab
