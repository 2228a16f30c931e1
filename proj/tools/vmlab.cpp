#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "vmlab/config.hpp"
#include "vmlab/error.hpp"
#include "vmlab/experiment.hpp"

namespace {

using nlohmann::json;
using namespace vmlab;

void print_manifest_summary(const RunManifest& m) {
  for (const auto& w : m.doc.value("warnings", json::array())) std::cerr << "*** warning: " << w.get<std::string>() << "\n";
  for (const char* section : {"references", "runs"}) {
    for (const auto& r : m.doc.value(section, json::array())) {
      if (r.value("status", "") == "ok") continue;
      std::cerr << r.value("id", "?") << ": " << r.value("status", "?");
      if (r.contains("error")) std::cerr << " (" << r["error"].get<std::string>() << ")";
      for (const auto& v : r.value("violations", json::array())) std::cerr << "\n  " << v.get<std::string>();
      std::cerr << "\n";
    }
  }
  std::cout << m.path().string() << "\n";
}

std::string fmt(const json& v) {
  if (!v.is_number()) return "      n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%9.4f", v.get<double>());
  return buf;
}

void print_rates(const json& rep) {
  std::cout << "window [" << rep["window"][0].get<double>() << ", " << rep["window"][1].get<double>() << "]\n";
  for (const auto& r : rep["references"]) {
    std::cout << r["id"].get<std::string>() << "  slope " << fmt(r.value("slope", json())) << "\n";
  }
  for (const auto& r : rep["runs"]) {
    std::cout << r["id"].get<std::string>() << "  slope " << fmt(r.value("slope", json()));
    if (r.contains("predicted")) {
      for (const char* target : {"cn", "lm"}) {
        const std::string key = std::string("measured_vs_") + target;
        const json pred = r["predicted"][std::string("vs_") + target];
        std::cout << "  vs " << target << ": predicted " << pred["verdict"].get<std::string>();
        if (r.contains(key)) {
          std::cout << ", measured " << r[key]["verdict"].get<std::string>();
          const json& agree = r[key]["agrees"];
          if (agree.is_boolean()) std::cout << (agree.get<bool>() ? " (agree)" : " (DISAGREE)");
        }
      }
    }
    if (r.contains("note")) std::cout << "  [" << r["note"].get<std::string>() << "]";
    if (r.contains("error")) std::cout << "  [" << r["error"].get<std::string>() << "]";
    if (r.contains("label")) std::cout << "  " << r["label"].get<std::string>();
    std::cout << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variable-mass inertial Newton lab"};
  app.require_subcommand(1);

  std::string config_path, manifest_path, figure_id, out_dir;
  int workers = 0;
  bool strict = false, as_json = false;

  auto* validate = app.add_subcommand("validate", "Assumption reports for every run of the config");
  validate->add_option("config", config_path, "Experiment config (JSON)")->required();
  validate->add_flag("--strict", strict, "Exit with code 4 when an assumption fails");

  auto* integrate = app.add_subcommand("integrate", "Integrate the configured scheme and write trajectories");
  integrate->add_option("config", config_path, "Experiment config (JSON)")->required();

  auto* figure = app.add_subcommand("figure", "Reproduce a figure's data as CSV files");
  figure->add_option("id", figure_id, "fig1_right, fig2, fig3, fig4, fig5 or fig6")->required();
  figure->add_option("config", config_path, "Experiment config (JSON)")->required();
  figure->add_flag("--strict", strict, "Stop with code 4 when an assumption needed by a comparison fails");

  for (auto* sub : {integrate, figure}) {
    sub->add_option("--out", out_dir, "Exact output directory (default: timestamped under output_dir)");
    sub->add_option("--workers", workers, "Worker cap (default: VMLAB_WORKERS or hardware threads)");
  }

  auto* classify = app.add_subcommand("classify", "Predicted rate classes for every run of the config");
  classify->add_option("config", config_path, "Experiment config (JSON)")->required();

  auto* rates = app.add_subcommand("rates", "Fit decay slopes from a run manifest");
  rates->add_option("manifest", manifest_path, "manifest.json of a figure run")->required();
  rates->add_flag("--json", as_json, "Print the JSON report");

  CLI11_PARSE(app, argc, argv);

  try {
    RunOptions opts;
    if (!out_dir.empty()) opts.out = out_dir;
    opts.workers = workers;

    if (*validate) {
      ExperimentConfig cfg = parse_config(config_path);
      const json rep = validate_report(cfg);
      std::cout << rep.dump(2) << "\n";
      return (strict || cfg.strict) && !rep["all_hold"].get<bool>() ? kExitAssumption : kExitOk;
    }
    if (*integrate) {
      const RunManifest m = run_integrate(parse_config(config_path), opts);
      print_manifest_summary(m);
      return m.exit_code;
    }
    if (*figure) {
      ExperimentConfig cfg = parse_config(config_path);
      cfg.strict = cfg.strict || strict;
      const RunManifest m = run_figure(cfg, figure_id, opts);
      print_manifest_summary(m);
      return m.exit_code;
    }
    if (*classify) {
      std::cout << classify_report(parse_config(config_path)).dump(2) << "\n";
      return kExitOk;
    }
    if (*rates) {
      const json rep = report_rates(RunManifest::load(manifest_path));
      if (as_json) std::cout << rep.dump(2) << "\n";
      else print_rates(rep);
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    if (e.code() == Errc::config) return kExitConfig;
    if (e.code() == Errc::divergence) return kExitDivergence;
    if (e.code() == Errc::assumption_violated) return kExitAssumption;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
