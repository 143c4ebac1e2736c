#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "reuse_assort/product_set.hpp"
#include "reuse_assort/rng.hpp"

namespace reuse_assort {

// Sentinel duration for a unit that never comes back.
inline constexpr int kInfiniteDuration = -1;
// Returned by sample_choice when the consumer takes the outside option.
inline constexpr int kOutside = -1;

struct DurationEntry {
  int periods;  // >= 1, or kInfiniteDuration
  double prob;
};

// Rental-duration distribution of one (type, product) pair.
//
// Time convention used throughout the library: a unit allocated at period t
// with duration d is out during [t, t + d - 1] and available again at t + d.
// survival(k) = P(d > k) is therefore the probability that a unit allocated k
// periods ago is still out.
class DurationDist {
 public:
  DurationDist();  // point mass at infinity
  explicit DurationDist(std::vector<DurationEntry> entries);

  static DurationDist infinite() { return DurationDist(); }
  static DurationDist fixed(int periods);

  double survival(int k) const;
  double pmf(int periods) const;
  double infinite_mass() const { return infinite_mass_; }
  bool is_infinite() const { return finite_.empty(); }
  // Largest finite duration in the support (0 when there is none).
  int max_finite() const { return finite_.empty() ? 0 : finite_.back().periods; }
  // Finite support entries ordered by duration.
  std::span<const DurationEntry> finite_entries() const { return finite_; }
  // All entries, the infinite one last (if it has positive mass).
  std::vector<DurationEntry> entries() const;

  // Inverse-CDF draw from u in [0, 1).
  int sample(double u) const;

 private:
  std::vector<DurationEntry> finite_;
  std::vector<double> survival_;  // survival_[k] = P(d > k), k = 0..max_finite
  std::vector<double> cdf_;       // cumulative over finite_
  double infinite_mass_ = 1.0;
};

struct MnlParams {
  double outside_weight = 0.0;
  std::vector<double> weights;
};

// Choice model phi(S, i). Either multinomial logit, or an explicit table used
// by test fixtures.
class ChoiceModel {
 public:
  using Table = std::map<ProductSet, std::vector<double>>;

  static ChoiceModel mnl(double outside_weight, std::vector<double> weights);
  // table[S][i] = phi(S, i). Subsets absent from the table may not be queried.
  static ChoiceModel explicit_table(int num_products, Table table);

  int num_products() const { return num_products_; }
  const MnlParams* as_mnl() const { return std::get_if<MnlParams>(&params_); }
  const Table* as_table() const { return std::get_if<Table>(&params_); }

  // Unchecked hot-path accessor; i must be a valid product index.
  double prob(ProductSet s, int i) const;
  // Fills out[i] = phi(S, i) for all products.
  void probs(ProductSet s, std::span<double> out) const;

  // Exhaustive check of phi(empty, i) = 0, sum_i phi(S, i) <= 1 and weak
  // substitutability over all subsets. Returns a description of the first
  // violation. Only runs for n <= 10; larger models are trusted.
  std::optional<std::string> find_assumption_violation() const;

 private:
  ChoiceModel() = default;
  int num_products_ = 0;
  std::variant<MnlParams, Table> params_;
};

class FeasibleFamily {
 public:
  static FeasibleFamily all_subsets() { return FeasibleFamily(); }
  static FeasibleFamily max_cardinality(int k);

  bool contains(ProductSet s) const {
    return !max_cardinality_ || s.size() <= *max_cardinality_;
  }
  std::optional<int> cardinality_limit() const { return max_cardinality_; }

 private:
  std::optional<int> max_cardinality_;
};

struct ConsumerType {
  std::string id;
  ChoiceModel choice;
  std::vector<double> fees;
  std::vector<DurationDist> durations;
};

struct CheckResult {
  std::string name;
  bool passed = true;
  std::string detail;
};

// Full problem description. Periods are 1-based (t = 1..T); products and
// types are 0-based indices.
class Instance {
 public:
  // Validates and throws ModelError on the first failed check.
  Instance(std::vector<int> inventory, int horizon, std::vector<ConsumerType> types,
           std::vector<std::vector<double>> arrival, FeasibleFamily family);

  // Builds without validating; pair with check() to report every problem.
  static Instance unchecked(std::vector<int> inventory, int horizon,
                            std::vector<ConsumerType> types,
                            std::vector<std::vector<double>> arrival, FeasibleFamily family);

  // Runs every model invariant and reports one result per check.
  std::vector<CheckResult> check() const;

  int num_products() const { return static_cast<int>(inventory_.size()); }
  int horizon() const { return horizon_; }
  int num_types() const { return static_cast<int>(types_.size()); }
  int inventory(int i) const { return inventory_[i]; }
  const std::vector<int>& inventories() const { return inventory_; }
  int min_inventory() const;
  const std::vector<ConsumerType>& types() const { return types_; }
  const ConsumerType& type(int z) const { return types_[z]; }
  const FeasibleFamily& family() const { return family_; }
  double arrival_prob(int t, int z) const { return arrival_[t - 1][z]; }
  const std::vector<std::vector<double>>& arrival() const { return arrival_; }

  // Type drawn at period t from u in [0, 1).
  int sample_type(int t, double u) const;

  // True when every type's duration for product i is the point mass at
  // infinity.
  bool product_non_reusable(int i) const;
  bool fully_non_reusable() const;

 private:
  Instance() = default;
  void build_cdfs();

  std::vector<int> inventory_;
  int horizon_ = 0;
  std::vector<ConsumerType> types_;
  std::vector<std::vector<double>> arrival_;
  std::vector<std::vector<double>> arrival_cdf_;
  FeasibleFamily family_;
};

// phi(S, i), range checked.
double choice_prob(const ChoiceModel& model, ProductSet s, int i);

// Returns a feasible S maximizing sum_i weights[i] * phi(S, i). Products with
// negative weight are dropped first. Ties go to the smallest set, then the
// lexicographically smallest one. MNL over all subsets uses the
// weight-ordered-prefix characterization; everything else is enumerated
// exhaustively (at most 20 candidate products).
ProductSet offline_oracle(const ChoiceModel& model, std::span<const double> weights,
                          const FeasibleFamily& family);

// Exhaustive version of offline_oracle, kept separate for cross-checking.
ProductSet offline_oracle_brute_force(const ChoiceModel& model,
                                      std::span<const double> weights,
                                      const FeasibleFamily& family);

double assortment_value(const ChoiceModel& model, std::span<const double> weights,
                        ProductSet s);

// Draws the consumer's pick from S: a product index or kOutside.
int sample_choice(const ChoiceModel& model, ProductSet s, Stream& stream);

}  // namespace reuse_assort
