#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "reuse_assort/dp.hpp"
#include "reuse_assort/inventory.hpp"
#include "reuse_assort/lp.hpp"
#include "reuse_assort/model.hpp"
#include "reuse_assort/rng.hpp"

namespace reuse_assort {

enum class PolicyKind { kSimRandom, kSimInfusion, kSimOptDis, kHybridI, kHybridII, kIB, kGR };

// Result-table label, e.g. "Sim+Infusion".
std::string policy_name(PolicyKind kind);
// Accepts the table labels and the short identifiers "SimRandom",
// "SimInfusion", "SimOptDis", "HybridI", "HybridII", "IB", "GR".
PolicyKind parse_policy_kind(const std::string& name);
bool is_simulation_based(PolicyKind kind);

struct PolicyConfig {
  // Random-discard probability. Defaults to gamma*(c_min) for Sim+Random and
  // to gamma*(c_i) per product inside Sim+Hybrid(i).
  std::optional<double> gamma;
  int switch_period = 10;
  int mc_iters = 20;
  // Rollouts of all candidates at a review share seeds.
  bool common_random_numbers = false;
};

// Shared, immutable inputs of a prepared policy.
struct PreparedInputs {
  std::shared_ptr<const Instance> instance;
  std::shared_ptr<const LpSolution> lp;
  std::shared_ptr<const ValueTables> tables;
};

// Per-episode decision maker. Sessions are cheap and not thread safe.
class PolicySession {
 public:
  virtual ~PolicySession() = default;
  virtual ProductSet decide(int t, int type, const InventoryState& inv, Stream& stream) = 0;
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual PolicyKind kind() const = 0;
  std::string name() const { return policy_name(kind()); }
  const Instance& instance() const { return *inputs_.instance; }

  // Decision without episode memory. For Sim+Hybrid(ii) this reviews the
  // leader on every call.
  virtual ProductSet decide(int t, int type, const InventoryState& inv, Stream& stream) const = 0;
  virtual std::unique_ptr<PolicySession> new_session(std::uint64_t episode_seed) const;

 protected:
  explicit Policy(PreparedInputs inputs) : inputs_(std::move(inputs)) {}
  PreparedInputs inputs_;
};

// Builds a policy. LP and tables may be null for IB and GR; the
// simulation-based kinds require both. Throws PolicyError on a kind/instance
// mismatch (Sim+OPTDis on a reusable instance).
std::shared_ptr<const Policy> prepare(PolicyKind kind, const PreparedInputs& inputs,
                                      const PolicyConfig& config = {});

// IB penalty: (e^{1-x} - e) / (1 - e).
double inventory_penalty(double fraction);

// Discard label of a product inside Sim+Hybrid(i).
enum class DiscardRule { kRandom, kThreshold };
std::vector<DiscardRule> hybrid_labels(const Instance& inst, const ValueTables& tables);

// Mean revenue of mc_iters continuations from (t, inv) under the candidate,
// each on its own stream derived from seed.
double estimate_future_revenue(const Policy& candidate, int t, const InventoryState& inv,
                               int mc_iters, std::uint64_t seed);

// Sim+Hybrid(ii) introspection: the candidates it chooses among.
std::vector<std::shared_ptr<const Policy>> hybrid_candidates(const Policy& hybrid_ii);

}  // namespace reuse_assort
