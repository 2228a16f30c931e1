#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vmlab/config.hpp"

namespace vmlab {

/// Process exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitDivergence = 3, kExitAssumption = 4 };

struct RunOptions {
  /// Exact output directory; otherwise `<output_dir>/<tag>_<stamp>` is created.
  std::optional<std::filesystem::path> out;
  /// Worker cap; 0 reads VMLAB_WORKERS (falling back to the hardware thread count).
  int workers = 0;
};

/// Manifest written as manifest.json at the root of the run directory.
struct RunManifest {
  std::filesystem::path root;
  nlohmann::json doc;
  int exit_code = kExitOk;

  std::filesystem::path path() const { return root / "manifest.json"; }
  /// Every file path listed in the manifest, relative to `root`.
  std::vector<std::string> files() const;
  void write() const;
  static RunManifest load(const std::filesystem::path& manifest_path);
};

const std::vector<std::string>& figure_ids();

/// Figure presets applied when the config leaves the corresponding keys out.
struct FigurePreset {
  std::string id;
  std::string family;
  double horizon = 50.0;
  std::vector<RunSpec> runs;
  std::vector<std::string> comparisons;
  std::optional<double> gamma;  // forced step size
  std::optional<double> beta;   // forced beta
  std::optional<int> n;         // default dimension
  std::optional<double> kappa;
  bool write_trajectories = false;
  std::string warning;
};

FigurePreset figure_preset(const std::string& id);

/// Default measurement window for fitted decay slopes: [T/20, T/5].
std::pair<double, double> default_rate_window(double horizon);

int worker_cap(int requested = 0);

/// Creates `<base>/<tag>_<YYYYmmdd-HHMMSS>` (suffixed _2, _3... when taken).
std::filesystem::path make_run_dir(const std::filesystem::path& base, const std::string& tag);

/// Assumption reports for every run of the sweep, as JSON.
nlohmann::json validate_report(const ExperimentConfig& cfg);

/// Predicted rate classes for every run of the sweep, as JSON.
nlohmann::json classify_report(const ExperimentConfig& cfg);

/// Integrates the configured scheme per sweep entry; writes trajectory and
/// diagnostic CSVs.
RunManifest run_integrate(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// Reproduces one figure's data as CSVs. Throws Errc::config when the
/// config does not fit the figure. Failed runs are recorded in the manifest
/// and reflected in `exit_code`.
RunManifest run_figure(const ExperimentConfig& cfg, const std::string& figure, const RunOptions& opts = {});

/// Fitted decay slopes of every distance-to-optimum CSV listed in the
/// manifest, compared against the predicted rate classes.
nlohmann::json report_rates(const RunManifest& manifest);

/// Problems found when cross-checking the manifest against the files on disk.
std::vector<std::string> verify_manifest(const RunManifest& manifest);

}  // namespace vmlab
