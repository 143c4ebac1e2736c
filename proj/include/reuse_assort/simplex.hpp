#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace reuse_assort {

enum class Sense { kMaximize, kMinimize };
enum class RowKind { kLessEqual, kGreaterEqual, kEqual };

// Dense LP: optimize objective . x over x >= 0 subject to the rows.
struct DenseLp {
  struct Row {
    std::vector<double> coeffs;  // one per variable
    RowKind kind = RowKind::kLessEqual;
    double rhs = 0.0;
  };
  int num_vars = 0;
  std::vector<double> objective;
  Sense sense = Sense::kMaximize;
  std::vector<Row> rows;
};

struct SimplexOptions {
  double pivot_tol = 1e-9;
  double optimality_tol = 1e-9;
  double feasibility_tol = 1e-9;
  int max_iterations = 1'000'000;
  // Consecutive degenerate pivots after which Bland's rule takes over.
  int degenerate_streak_for_bland = 20;
};

struct SimplexResult {
  std::vector<double> primal;
  // Shadow price of every row: d(objective) / d(rhs).
  std::vector<double> duals;
  double objective = 0.0;
  int iterations = 0;
};

// Two-phase dense tableau simplex. Throws LpError on infeasible, unbounded or
// iteration-limit outcomes.
SimplexResult simplex_solve(const DenseLp& lp, const SimplexOptions& options = {});

// Revised simplex specialized to block-angular LPs of the form
//
//   max  sum_j cost_j x_j
//   s.t. sum_j a_rj x_j <= b_r        (coupling rows, b_r >= 0)
//        sum_{j in block k} x_j <= 1  (one convexity row per block)
//        x >= 0
//
// The convexity rows are handled implicitly (generalized upper bounding): each
// block keeps one "key" basic variable, and only an m x m working basis over
// the coupling rows is stored. Columns and rows may be added between solves.
// New columns warm start the primal simplex; new rows enter with their slacks
// basic and the dual simplex restores feasibility.
class BlockSimplex {
 public:
  using SparseColumn = std::vector<std::pair<int, double>>;  // (row, coeff)

  explicit BlockSimplex(int num_blocks, SimplexOptions options = {});

  int num_blocks() const { return num_blocks_; }
  int num_rows() const { return static_cast<int>(rhs_.size()); }
  int num_columns() const { return static_cast<int>(cols_.size()); }

  int add_column(int block, double cost, SparseColumn entries);
  // entries: (column, coeff) for the existing columns that touch this row.
  int add_row(double rhs, const std::vector<std::pair<int, double>>& entries);

  // Solves to optimality. Throws LpError on failure.
  void solve();

  double objective() const { return objective_; }
  double primal(int column) const;
  // Slack of the convexity row of block k (the "empty" variable).
  double block_slack(int block) const;
  double row_dual(int row) const { return row_duals_[row]; }
  double block_dual(int block) const { return block_duals_[block]; }
  int iterations() const { return total_iterations_; }

 private:
  // Variable handle: structural column, block slack, or coupling slack.
  enum class Kind : std::uint8_t { kColumn = 0, kBlockSlack = 1, kRowSlack = 2 };
  struct Var {
    Kind kind;
    int id;
    friend bool operator==(Var, Var) = default;
  };
  struct Column {
    int block;
    double cost;
    SparseColumn entries;
  };
  static constexpr int kNonbasic = -1;
  static constexpr int kKey = -2;

  int block_of(Var v) const;
  double cost_of(Var v) const;
  // acc += scale * a(v)
  void axpy(Var v, double scale, std::vector<double>& acc) const;
  double dot(Var v, const std::vector<double>& y) const;
  int& position(Var v);
  int position(Var v) const;
  long order_key(Var v) const;

  void reset_basis();
  // Brings rows added since the last solve into the basis with their slacks.
  void extend_basis();
  void refactor();
  void recompute_values();
  void compute_duals();
  double reduced_cost(Var v) const;
  // Fills w_ = W^-1 (a_q - a_key(block q)) and the key components wkey_.
  void compute_direction(Var enter);
  // Moves the entering variable to level theta along the current direction
  // and exchanges it with the leaving slot or block key.
  void apply_pivot(Var enter, double theta, int leave_slot, int leave_block);
  void pivot_replace_slot(int slot, const std::vector<double>& w);
  void primal_phase(int& iterations);
  void dual_phase(int& iterations);
  bool dual_feasible();
  void count_iteration(int& iterations);

  int num_blocks_;
  SimplexOptions opt_;
  std::vector<double> rhs_;
  std::vector<Column> cols_;

  // Basis.
  std::vector<Var> key_;         // per block
  std::vector<Var> slot_;        // per working-basis column
  std::vector<double> x_key_;    // values of keys
  std::vector<double> x_slot_;   // values of slot variables
  std::vector<int> col_pos_;     // per structural column: slot, kKey or kNonbasic
  std::vector<int> bslack_pos_;  // per block slack
  std::vector<int> rslack_pos_;  // per row slack
  std::vector<double> winv_;     // row-major m x m inverse of the working basis
  int basis_rows_ = 0;           // rows covered by the current basis
  int updates_since_refactor_ = 0;
  bool basis_valid_ = false;

  // Scratch for the current pivot.
  std::vector<double> w_;
  std::vector<double> wkey_;
  std::vector<int> touched_;

  std::vector<double> row_duals_;
  std::vector<double> block_duals_;
  double objective_ = 0.0;
  int total_iterations_ = 0;
};

}  // namespace reuse_assort
