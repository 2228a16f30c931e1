#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vmlab/integrator.hpp"
#include "vmlab/linalg.hpp"
#include "vmlab/objective.hpp"
#include "vmlab/schedule.hpp"

namespace vmlab {

struct ObjectiveConfig {
  std::string family = "quadratic";  // quadratic | gauss_quad | logsumexp_quad | poly50_quad
  std::optional<std::vector<double>> spectrum;
  std::optional<Matrix> matrix;
  std::optional<double> kappa;
  std::optional<double> lambda_max;
};

struct RunSpec {
  std::string id;
  Schedule eps = Schedule::constant(1.0);
  Schedule alpha = Schedule::zero();
};

enum class X0Mode { signs, explicit_values };

struct ExperimentConfig {
  ObjectiveConfig objective;
  int n = 100;
  std::vector<RunSpec> runs;  // empty: figure preset
  double gamma = 0.1;
  double beta = 1.0;
  std::optional<double> horizon;
  X0Mode x0_mode = X0Mode::signs;
  std::vector<double> x0_values;
  std::vector<double> v0;
  std::uint64_t seed = 0;
  std::string output_dir = "runs";
  std::vector<std::string> comparisons;  // empty: figure preset
  bool strict = false;
  std::vector<int> lg_modes;
  std::optional<std::pair<double, double>> rate_window;
  Scheme scheme = Scheme::vm;
  std::vector<std::string> defaulted;  // keys filled from defaults
  std::string source;                  // path or "<string>"
  std::string raw_text;

  bool beta_defaulted() const;
};

/// Known comparison names.
const std::vector<std::string>& comparison_names();

/// Parses the JSON experiment file. Unknown keys, invalid families or
/// non-positive gamma/beta/T raise Errc::config with "<source>:<line>: ..." context.
ExperimentConfig parse_config(const std::filesystem::path& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& source = "<string>");

/// Schedule <-> JSON: {"family": "power", "c0": 1, "a": 2}, {"family": "constant", "c0": 0.5},
/// {"family": "zero"}, {"family": "table", "times": [...], "values": [...]}.
nlohmann::json schedule_to_json(const Schedule& s);
Schedule schedule_from_json(const nlohmann::json& j);

/// Seeded +-1 coordinates in signs mode, the given values otherwise.
Vector make_x0(X0Mode mode, int n, std::uint64_t seed, const std::vector<double>& values = {});

QuadraticSpec build_spec(const ExperimentConfig& cfg);
Objective build_objective(const ExperimentConfig& cfg, const QuadraticSpec& spec);

/// Resolved configuration as JSON (defaults filled in).
nlohmann::json config_echo(const ExperimentConfig& cfg);

/// FNV-1a 64-bit hash, hex encoded.
std::string fnv1a_hex(const std::string& data);

}  // namespace vmlab
