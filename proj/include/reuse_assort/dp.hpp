#pragma once

#include <string>
#include <utility>
#include <vector>

#include "reuse_assort/lp.hpp"
#include "reuse_assort/model.hpp"

namespace reuse_assort {

// Per-product value tables derived from an LP assignment. Time indices are
// the period number itself (1..T+1); slot 0 is unused.
struct ValueTables {
  int horizon = 0;
  // Replenished per-unit revenue-to-go: V[i][t], V[i][T+1] = 0.
  std::vector<std::vector<double>> V;
  // Acceptance thresholds for the replenished DP: P[i][t][z].
  std::vector<std::vector<std::vector<double>>> P;
  // Inventory-level revenue-to-go E[i][t][I] (I = 0..c_i) and thresholds
  // Q[i][t][I] = E[i][t+1][I] - E[i][t+1][I-1]. Only filled for products that
  // never return; empty for the others.
  std::vector<std::vector<std::vector<double>>> E;
  std::vector<std::vector<std::vector<double>>> Q;
  // c_i V[i][1] over the product's LP contribution (1 when that is 0).
  std::vector<double> R;

  bool has_inventory_dp(int product) const { return !E[product].empty(); }
};

// One Bellman comparison of the replenished DP for a single (S, type) term.
//   stay     = V_{t+1}
//   returned = sum over finite d of g(d) V_{t+d}
// Returns {value if discarded, value if offered}.
std::pair<double, double> replenished_branches(double stay, double returned, double phi,
                                               double fee, int units);
// Same for the inventory-level DP: keep = E_{t+1}^I, sold = E_{t+1}^{I-1}.
std::pair<double, double> inventory_branches(double keep, double sold, double phi, double fee);

struct ReplenishedDp {
  std::vector<std::vector<double>> V;               // [i][t]
  std::vector<std::vector<std::vector<double>>> P;  // [i][t][z]
};
ReplenishedDp optimistic_dp(const Instance& inst, const LpSolution& lp);

struct InventoryDp {
  std::vector<std::vector<double>> E;  // [t][I]
  std::vector<std::vector<double>> Q;  // [t][I]
};
// Throws PolicyError if product i can return to inventory.
InventoryDp inventory_dp_product(const Instance& inst, const LpSolution& lp, int product);
// Whole-instance version; refuses any instance with a reusable product.
std::vector<InventoryDp> inventory_dp(const Instance& inst, const LpSolution& lp);

// min over g in [0, 1] of 1 - (1 - g)(1 - exp(-g^2 x / (2 - g))).
// Returns {minimum, minimizer}.
std::pair<double, double> epsilon_star(double x);
double epsilon_objective(double gamma, double x);

std::vector<double> hybrid_ratio(const Instance& inst, const LpSolution& lp,
                                 const std::vector<std::vector<double>>& V);

// Replenished DP, inventory DP for every non-returning product and ratios.
ValueTables build_value_tables(const Instance& inst, const LpSolution& lp);

std::string value_tables_to_json(const ValueTables& tables, int indent = 1);

}  // namespace reuse_assort
