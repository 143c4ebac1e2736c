#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reuse_assort/inventory.hpp"
#include "reuse_assort/policies.hpp"

namespace reuse_assort {

struct StepRecord {
  int t = 0;
  int type = 0;
  ProductSet offered;
  int chosen = kOutside;
  double fee = 0.0;
  int duration = 0;  // 0 when nothing was rented
};

struct EpisodeResult {
  double revenue = 0.0;
  std::vector<StepRecord> trace;  // filled when requested
  // Offers that named an unavailable or infeasible product. Such products are
  // stripped before the customer chooses; any non-zero count is a policy bug.
  int infeasible_offers = 0;
  int inconsistent_states = 0;
};

struct EpisodeOptions {
  bool record_trace = false;
  bool check_state = false;  // verify InventoryState invariants every step
};

// Plays periods 1..T. Streams for arrivals, choices, durations and the policy
// are derived from episode_seed, so the result depends only on the inputs.
EpisodeResult run_episode(const Instance& inst, const Policy& policy, std::uint64_t episode_seed,
                          const EpisodeOptions& options = {});

// Plays periods t_start..T from the given state.
EpisodeResult run_from(const Instance& inst, PolicySession& session, int t_start,
                       InventoryState inv, std::uint64_t seed, const EpisodeOptions& options = {});

struct MCStats {
  std::string policy;
  std::vector<double> revenues;  // indexed by run id
  double mean = 0.0;
  double se = 0.0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double min = 0.0;
  double max = 0.0;
  long infeasible_offers = 0;
  long inconsistent_states = 0;
};

// Order statistics use linear interpolation between closest ranks.
MCStats summarize(std::vector<double> revenues);

std::uint64_t episode_seed(std::uint64_t master_seed, int run_id);

// Runs episodes run_id = 0..n_runs-1 on up to `threads` workers (0 = all
// cores). Output is identical for any thread count.
MCStats monte_carlo(const Instance& inst, const Policy& policy, int n_runs,
                    std::uint64_t master_seed, int threads = 0, bool check_state = false);

// Standard error of mean(a - b) for run-aligned samples.
double paired_se(const std::vector<double>& a, const std::vector<double>& b);

// Offline optimum for the one-unit 1/2-return instance: sees every rental
// duration before deciding, rents whenever the draw is "back next period",
// and rents once more at the end.
double clairvoyant_offline_ec21(int horizon, std::uint64_t episode_seed);

// One JSON object per step.
std::string trace_to_jsonl(const EpisodeResult& result);

}  // namespace reuse_assort
