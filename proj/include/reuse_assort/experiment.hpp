#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "reuse_assort/bench.hpp"
#include "reuse_assort/errors.hpp"
#include "reuse_assort/model.hpp"
#include "reuse_assort/policies.hpp"
#include "reuse_assort/sim.hpp"

namespace reuse_assort {

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config", what) {}
};

struct PolicySpec {
  PolicyKind kind = PolicyKind::kGR;
  PolicyConfig config;
};

// Experiment config (JSON):
//   {"scenario": "RENTAL" | "NO_RENTAL" | [...], "kappas": [0, 1, 2, 3],
//    "n_runs": 50,
//    "policies": [{"kind": "SimRandom", "params": {"gamma": 0.1}}, ...],
//    "seeds": {"instance": 1, "mc": 2},
//    "hybrid": {"switch_period": 10, "mc_iters": 20, "common_random_numbers": false},
//    "gamma": 0.1, "output_dir": "results",
//    "horizon": 300, "inventory": 20, "threads": 0}
// Everything but "policies" has a default.
struct ExperimentConfig {
  std::vector<Scenario> scenarios = {Scenario::kNoRental};
  std::vector<double> kappas = {0.0, 1.0, 2.0, 3.0};
  int n_runs = 50;
  std::vector<PolicySpec> policies;
  std::uint64_t instance_seed = 1;
  std::uint64_t mc_seed = 2;
  std::string output_dir = "results";
  std::optional<int> horizon;
  std::optional<int> inventory;
  int threads = 0;
};

// Throws ConfigError with the offending field.
ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);

struct CellResult {
  Scenario scenario = Scenario::kNoRental;
  double kappa = 0.0;
  double lp_objective = 0.0;
  // One per configured policy in config order; Sim+OPTDis is skipped on
  // cells with reusable products.
  std::vector<MCStats> stats;
};

struct ExperimentResult {
  std::vector<CellResult> cells;
  std::string per_run_csv;
  std::string summary_csv;
  // Policy means above LP + 3 SE, or infeasible offers; empty when all passed.
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

// Runs every (scenario, kappa) cell. Files are written to output_dir unless
// it is empty.
ExperimentResult run_experiment(const ExperimentConfig& config);

// Rows "c,one_minus_eps,best_of_both" for c = lo, lo + step, ..., hi.
std::string emit_ratio_curve(double lo, double hi, double step);

struct Report {
  std::vector<CheckResult> checks;
  bool ok() const;
  std::string to_string() const;
};

// Parses the instance file and runs every model check.
Report validate_instance_file(const std::string& path);

// Closed-form fixtures: two-customer gap instance, single-unit 1/2-return
// chain, zero fees, epsilon* endpoints.
Report run_canonical_suite();

}  // namespace reuse_assort
