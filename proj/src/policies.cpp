#include "reuse_assort/policies.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "reuse_assort/errors.hpp"
#include "reuse_assort/sampling.hpp"
#include "reuse_assort/sim.hpp"

namespace reuse_assort {

std::string policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kSimRandom: return "Sim+Random";
    case PolicyKind::kSimInfusion: return "Sim+Infusion";
    case PolicyKind::kSimOptDis: return "Sim+OPTDis";
    case PolicyKind::kHybridI: return "Sim+Hybrid(i)";
    case PolicyKind::kHybridII: return "Sim+Hybrid(ii)";
    case PolicyKind::kIB: return "IB";
    case PolicyKind::kGR: return "GR";
  }
  return "?";
}

PolicyKind parse_policy_kind(const std::string& name) {
  static const std::pair<const char*, PolicyKind> kNames[] = {
      {"SimRandom", PolicyKind::kSimRandom},   {"SimInfusion", PolicyKind::kSimInfusion},
      {"SimOptDis", PolicyKind::kSimOptDis},   {"HybridI", PolicyKind::kHybridI},
      {"HybridII", PolicyKind::kHybridII},     {"IB", PolicyKind::kIB},
      {"GR", PolicyKind::kGR},
  };
  for (const auto& [id, kind] : kNames) {
    if (name == id || name == policy_name(kind)) return kind;
  }
  throw PolicyError("unknown policy kind \"" + name + "\"");
}

bool is_simulation_based(PolicyKind kind) {
  return kind != PolicyKind::kIB && kind != PolicyKind::kGR;
}

double inventory_penalty(double x) {
  const double e = std::numbers::e;
  return (std::exp(1.0 - x) - e) / (1.0 - e);
}

std::vector<DiscardRule> hybrid_labels(const Instance& inst, const ValueTables& tables) {
  std::vector<DiscardRule> labels(inst.num_products());
  for (int i = 0; i < inst.num_products(); ++i) {
    const double eps = epsilon_star(inst.inventory(i)).first;
    labels[i] = tables.R[i] + eps < 1.0 ? DiscardRule::kRandom : DiscardRule::kThreshold;
  }
  return labels;
}

namespace {

class ForwardingSession final : public PolicySession {
 public:
  explicit ForwardingSession(const Policy& p) : policy_(p) {}
  ProductSet decide(int t, int type, const InventoryState& inv, Stream& stream) override {
    return policy_.decide(t, type, inv, stream);
  }

 private:
  const Policy& policy_;
};

// Sample from the LP, discard, drop unavailable products, then resample a
// sub-assortment so survivors keep the suggested choice probabilities.
class SimulationPolicy : public Policy {
 public:
  using Policy::Policy;

  ProductSet decide(int t, int type, const InventoryState& inv, Stream& stream) const final {
    const ProductSet suggested = suggest(t, type, stream);
    if (suggested.empty()) return suggested;
    const ProductSet kept = discard(t, type, suggested, inv, stream) & inv.available_set();
    if (kept.empty()) return kept;
    const auto& choice = instance().type(type).choice;
    std::vector<double> targets(instance().num_products(), 0.0);
    choice.probs(suggested, targets);
    return sub_assortment_sample(choice, kept, targets, stream);
  }

 protected:
  virtual ProductSet discard(int t, int type, ProductSet suggested, const InventoryState& inv,
                             Stream& stream) const = 0;

  bool passes_replenished(int i, int t, int type) const {
    return instance().type(type).fees[i] >= inputs_.tables->P[i][t][type];
  }
  bool passes_inventory(int i, int t, int type, const InventoryState& inv) const {
    const int units = inv.available(i);
    if (units <= 0) return false;
    return instance().type(type).fees[i] >= inputs_.tables->Q[i][t][units];
  }

 private:
  ProductSet suggest(int t, int type, Stream& stream) const {
    const auto cols = inputs_.lp->columns_for(t, type);
    if (cols.empty()) return ProductSet{};
    const double u = stream.uniform();
    double acc = 0.0;
    for (const auto& c : cols) {
      acc += c.y;
      if (u < acc) return c.set;
    }
    return cols.back().set;
  }
};

class SimRandomPolicy final : public SimulationPolicy {
 public:
  SimRandomPolicy(PreparedInputs in, double gamma) : SimulationPolicy(std::move(in)), gamma_(gamma) {}
  PolicyKind kind() const override { return PolicyKind::kSimRandom; }
  double gamma() const { return gamma_; }

 protected:
  ProductSet discard(int, int, ProductSet s, const InventoryState&, Stream& stream) const override {
    ProductSet kept = s;
    s.for_each([&](int i) {
      if (stream.bernoulli(gamma_)) kept.erase(i);
    });
    return kept;
  }

 private:
  double gamma_;
};

class SimInfusionPolicy final : public SimulationPolicy {
 public:
  explicit SimInfusionPolicy(PreparedInputs in) : SimulationPolicy(std::move(in)) {}
  PolicyKind kind() const override { return PolicyKind::kSimInfusion; }

 protected:
  ProductSet discard(int t, int type, ProductSet s, const InventoryState&, Stream&) const override {
    ProductSet kept = s;
    s.for_each([&](int i) {
      if (!passes_replenished(i, t, type)) kept.erase(i);
    });
    return kept;
  }
};

class SimOptDisPolicy final : public SimulationPolicy {
 public:
  explicit SimOptDisPolicy(PreparedInputs in) : SimulationPolicy(std::move(in)) {}
  PolicyKind kind() const override { return PolicyKind::kSimOptDis; }

 protected:
  ProductSet discard(int t, int type, ProductSet s, const InventoryState& inv,
                     Stream&) const override {
    ProductSet kept = s;
    s.for_each([&](int i) {
      if (!passes_inventory(i, t, type, inv)) kept.erase(i);
    });
    return kept;
  }
};

class HybridIPolicy final : public SimulationPolicy {
 public:
  HybridIPolicy(PreparedInputs in, std::vector<DiscardRule> labels, std::vector<double> gammas)
      : SimulationPolicy(std::move(in)), labels_(std::move(labels)), gammas_(std::move(gammas)) {}
  PolicyKind kind() const override { return PolicyKind::kHybridI; }

 protected:
  ProductSet discard(int t, int type, ProductSet s, const InventoryState& inv,
                     Stream& stream) const override {
    ProductSet kept = s;
    s.for_each([&](int i) {
      bool keep;
      if (labels_[i] == DiscardRule::kRandom) {
        keep = !stream.bernoulli(gammas_[i]);
      } else if (inputs_.tables->has_inventory_dp(i)) {
        keep = passes_inventory(i, t, type, inv);
      } else {
        keep = passes_replenished(i, t, type);
      }
      if (!keep) kept.erase(i);
    });
    return kept;
  }

 private:
  std::vector<DiscardRule> labels_;
  std::vector<double> gammas_;
};

// Myopic oracle call on fee weights, optionally scaled by the IB penalty.
class OraclePolicy final : public Policy {
 public:
  OraclePolicy(PreparedInputs in, bool balance) : Policy(std::move(in)), balance_(balance) {}
  PolicyKind kind() const override { return balance_ ? PolicyKind::kIB : PolicyKind::kGR; }

  ProductSet decide(int, int type, const InventoryState& inv, Stream&) const override {
    const auto& ty = instance().type(type);
    std::vector<double> w(instance().num_products());
    for (int i = 0; i < instance().num_products(); ++i) {
      const int units = inv.available(i);
      if (units <= 0) {
        w[i] = -1.0;  // dropped by the oracle
      } else {
        w[i] = balance_ ? ty.fees[i] * inventory_penalty(static_cast<double>(units) / inv.capacity(i))
                        : ty.fees[i];
      }
    }
    return offline_oracle(ty.choice, w, instance().family());
  }

 private:
  bool balance_;
};

class HybridIIPolicy;

class HybridIISession final : public PolicySession {
 public:
  HybridIISession(const HybridIIPolicy& owner, std::uint64_t seed) : owner_(owner), seed_(seed) {}
  ProductSet decide(int t, int type, const InventoryState& inv, Stream& stream) override;

 private:
  const HybridIIPolicy& owner_;
  std::uint64_t seed_;
  int leader_ = -1;
};

class HybridIIPolicy final : public Policy {
 public:
  HybridIIPolicy(PreparedInputs in, std::vector<std::shared_ptr<const Policy>> candidates,
                 const PolicyConfig& cfg)
      : Policy(std::move(in)), candidates_(std::move(candidates)), cfg_(cfg) {
    for (int k = 0; k < static_cast<int>(candidates_.size()); ++k) {
      if (candidates_[k]->kind() == PolicyKind::kSimInfusion) preferred_ = k;
    }
  }
  PolicyKind kind() const override { return PolicyKind::kHybridII; }

  ProductSet decide(int t, int type, const InventoryState& inv, Stream& stream) const override {
    const int leader = review(t, inv, stream.next_u64());
    return candidates_[leader]->decide(t, type, inv, stream);
  }
  std::unique_ptr<PolicySession> new_session(std::uint64_t episode_seed) const override {
    return std::make_unique<HybridIISession>(*this, episode_seed);
  }

  bool review_due(int t) const {
    return cfg_.switch_period > 0 && (t - 1) % cfg_.switch_period == 0;
  }

  // Index of the candidate with the best estimated revenue-to-go; ties keep
  // the preferred candidate.
  int review(int t, const InventoryState& inv, std::uint64_t seed) const {
    std::vector<double> est(candidates_.size());
    for (int k = 0; k < static_cast<int>(candidates_.size()); ++k) {
      const std::uint64_t s = cfg_.common_random_numbers
                                  ? split_seed(seed, {static_cast<std::uint64_t>(t)})
                                  : split_seed(seed, {static_cast<std::uint64_t>(t),
                                                      static_cast<std::uint64_t>(k)});
      est[k] = estimate_future_revenue(*candidates_[k], t, inv, cfg_.mc_iters, s);
    }
    int best = preferred_;
    for (int k = 0; k < static_cast<int>(candidates_.size()); ++k) {
      if (est[k] > est[best]) best = k;
    }
    return best;
  }

  const std::vector<std::shared_ptr<const Policy>>& candidates() const { return candidates_; }
  const Policy& candidate(int k) const { return *candidates_[k]; }

 private:
  std::vector<std::shared_ptr<const Policy>> candidates_;
  PolicyConfig cfg_;
  int preferred_ = 0;
};

ProductSet HybridIISession::decide(int t, int type, const InventoryState& inv, Stream& stream) {
  if (leader_ < 0 || owner_.review_due(t)) {
    leader_ = owner_.review(t, inv, split_seed(seed_, StreamId::kRollout));
  }
  return owner_.candidate(leader_).decide(t, type, inv, stream);
}

void require_tables(const PreparedInputs& in, PolicyKind kind) {
  if (!in.instance) throw PolicyError("no instance given");
  if (is_simulation_based(kind) && (!in.lp || !in.tables)) {
    throw PolicyError(policy_name(kind) + " needs an LP solution and value tables");
  }
}

}  // namespace

std::unique_ptr<PolicySession> Policy::new_session(std::uint64_t) const {
  return std::make_unique<ForwardingSession>(*this);
}

std::shared_ptr<const Policy> prepare(PolicyKind kind, const PreparedInputs& in,
                                      const PolicyConfig& cfg) {
  require_tables(in, kind);
  const Instance& inst = *in.instance;
  if (cfg.gamma && !(*cfg.gamma >= 0.0 && *cfg.gamma <= 1.0)) {
    throw PolicyError("gamma must lie in [0, 1]");
  }
  switch (kind) {
    case PolicyKind::kSimRandom: {
      const double gamma = cfg.gamma.value_or(epsilon_star(inst.min_inventory()).second);
      return std::make_shared<SimRandomPolicy>(in, gamma);
    }
    case PolicyKind::kSimInfusion:
      return std::make_shared<SimInfusionPolicy>(in);
    case PolicyKind::kSimOptDis:
      if (!inst.fully_non_reusable()) {
        throw PolicyError("Sim+OPTDis needs an instance where no product returns");
      }
      return std::make_shared<SimOptDisPolicy>(in);
    case PolicyKind::kHybridI: {
      std::vector<double> gammas(inst.num_products());
      for (int i = 0; i < inst.num_products(); ++i) {
        gammas[i] = cfg.gamma.value_or(epsilon_star(inst.inventory(i)).second);
      }
      return std::make_shared<HybridIPolicy>(in, hybrid_labels(inst, *in.tables), std::move(gammas));
    }
    case PolicyKind::kHybridII: {
      if (cfg.mc_iters < 1) throw PolicyError("mc_iters must be >= 1");
      std::vector<std::shared_ptr<const Policy>> cands = {prepare(PolicyKind::kSimRandom, in, cfg),
                                                          prepare(PolicyKind::kSimInfusion, in, cfg)};
      if (inst.fully_non_reusable()) cands.push_back(prepare(PolicyKind::kSimOptDis, in, cfg));
      return std::make_shared<HybridIIPolicy>(in, std::move(cands), cfg);
    }
    case PolicyKind::kIB:
      return std::make_shared<OraclePolicy>(in, true);
    case PolicyKind::kGR:
      return std::make_shared<OraclePolicy>(in, false);
  }
  throw PolicyError("unhandled policy kind");
}

double estimate_future_revenue(const Policy& candidate, int t, const InventoryState& inv,
                               int mc_iters, std::uint64_t seed) {
  const Instance& inst = candidate.instance();
  if (t > inst.horizon() || mc_iters <= 0) return 0.0;
  double total = 0.0;
  for (int r = 0; r < mc_iters; ++r) {
    const std::uint64_t s = split_seed(seed, {static_cast<std::uint64_t>(r)});
    auto session = candidate.new_session(s);
    total += run_from(inst, *session, t, inv, s).revenue;
  }
  return total / mc_iters;
}

std::vector<std::shared_ptr<const Policy>> hybrid_candidates(const Policy& p) {
  const auto* h = dynamic_cast<const HybridIIPolicy*>(&p);
  if (!h) throw PolicyError("not a Sim+Hybrid(ii) policy");
  return h->candidates();
}

}  // namespace reuse_assort
