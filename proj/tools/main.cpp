// reuse-assort: run experiment sweeps, emit the ratio curve, validate
// instance files, or run the closed-form fixture suite.

#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "reuse_assort/experiment.hpp"

namespace ra = reuse_assort;

namespace {

constexpr const char* kOutputDirEnv = "REUSE_ASSORT_OUTPUT_DIR";

int run_mode(const std::string& config_path) {
  ra::ExperimentConfig cfg = ra::load_experiment_config(config_path);
  if (const char* dir = std::getenv(kOutputDirEnv)) cfg.output_dir = dir;
  const ra::ExperimentResult res = ra::run_experiment(cfg);
  std::cout << res.summary_csv;
  for (const auto& f : res.failures) std::cerr << "FAIL " << f << "\n";
  return res.ok() ? 0 : 1;
}

int report_mode(const ra::Report& report) {
  std::cout << report.to_string();
  return report.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Assortment policies for reusable resources"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run an experiment sweep from a JSON config");
  run->add_option("--config", config_path, "Experiment config")->required()->check(CLI::ExistingFile);

  double lo = 0.0, hi = 100.0, step = 1.0;
  auto* curve = app.add_subcommand("curve", "Print c, 1 - eps*(c), max(1/2, 1 - eps*(c)) as CSV");
  curve->add_option("--min", lo, "Smallest c")->capture_default_str();
  curve->add_option("--max", hi, "Largest c")->capture_default_str();
  curve->add_option("--step", step, "Grid step")->capture_default_str();

  std::string instance_path;
  auto* validate = app.add_subcommand("validate", "Check a JSON instance file");
  validate->add_option("path", instance_path, "Instance file")->required();

  auto* canonical = app.add_subcommand("canonical", "Run the closed-form fixture suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_mode(config_path);
    if (*curve) {
      std::cout << ra::emit_ratio_curve(lo, hi, step);
      return 0;
    }
    if (*validate) return report_mode(ra::validate_instance_file(instance_path));
    if (*canonical) return report_mode(ra::run_canonical_suite());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
