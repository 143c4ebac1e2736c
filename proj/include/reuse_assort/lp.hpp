#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reuse_assort/model.hpp"

namespace reuse_assort {

// One assortment variable of the expected-revenue LP: the probability that S
// is offered to a type-`type` arrival at period t.
struct LpColumn {
  int t = 1;
  int type = 0;
  ProductSet set;
  double y = 0.0;
};

struct LpOptions {
  double reduced_cost_tol = 1e-7;
  double row_violation_tol = 1e-7;
  int max_iters = 2000;
};

// Solved assignment. Columns are grouped by (t, type) in increasing order;
// inside a group the empty assortment comes last and carries whatever mass
// the other columns leave, so every group with positive arrival probability
// sums to one.
class LpSolution {
 public:
  double objective = 0.0;
  std::vector<double> contrib;              // [product]
  std::vector<std::vector<double>> theta;   // [product][t - 1], inventory-row duals
  std::vector<std::vector<double>> lambda;  // [t - 1][type], convexity-row duals

  // Solver diagnostics.
  int iterations = 0;
  int inventory_rows = 0;
  double max_reduced_cost = 0.0;
  double max_row_violation = 0.0;

  LpSolution() = default;
  LpSolution(int horizon, int num_types, std::vector<LpColumn> columns);

  int horizon() const { return horizon_; }
  int num_types() const { return num_types_; }
  std::span<const LpColumn> columns() const { return columns_; }
  std::span<const LpColumn> columns_for(int t, int type) const;

  // Sum over (i, t) of c_i theta + sum of lambda.
  double dual_objective(const Instance& inst) const;

 private:
  int horizon_ = 0;
  int num_types_ = 0;
  std::vector<LpColumn> columns_;
  std::vector<int> offsets_;  // group (t, z) spans offsets_[g] .. offsets_[g + 1]
};

// Column-and-row generation over the restricted master, priced with the
// offline oracle. Throws LpError when max_iters is exhausted.
LpSolution solve_expected_lp(const Instance& inst, const LpOptions& options = {});

// Same LP with every feasible assortment and every inventory row present,
// solved by the dense simplex. Throws GuardError when
// (#feasible sets) * T * (#types) exceeds 50,000.
LpSolution full_enumeration_lp(const Instance& inst);

// Expected number of units of product i out at period t under the solution.
double plug_back_usage(const Instance& inst, const LpSolution& sol, int product, int t);
// All of the above at once: [product][t - 1].
std::vector<std::vector<double>> plug_back_usage_table(const Instance& inst,
                                                       const LpSolution& sol);

// Checks the solution invariants (non-negative y, unit mass per group,
// plug-back feasibility within 1e-6, contributions summing to the objective).
// Returns a description of the first failure.
std::optional<std::string> find_solution_violation(const Instance& inst, const LpSolution& sol);

std::string lp_solution_to_json(const LpSolution& sol, int indent = 1);

}  // namespace reuse_assort
