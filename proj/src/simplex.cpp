#include "reuse_assort/simplex.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "reuse_assort/errors.hpp"

namespace reuse_assort {

// ---------------------------------------------------------------------------
// Dense two-phase tableau

namespace {

class Tableau {
 public:
  Tableau(int rows, int cols) : rows_(rows), cols_(cols), data_((std::size_t)rows * (cols + 1), 0.0) {}
  double& at(int r, int c) { return data_[(std::size_t)r * (cols_ + 1) + c]; }
  double at(int r, int c) const { return data_[(std::size_t)r * (cols_ + 1) + c]; }
  double& rhs(int r) { return at(r, cols_); }
  double* row(int r) { return &data_[(std::size_t)r * (cols_ + 1)]; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }

 private:
  int rows_;
  int cols_;
  std::vector<double> data_;
};

struct TableauSolver {
  Tableau tab;
  std::vector<double> reduced;  // c_j - c_B B^-1 a_j, plus objective value slot
  std::vector<double> cost;     // current phase costs (maximization)
  std::vector<int> basis;
  std::vector<bool> allowed;
  const SimplexOptions& opt;
  int iterations = 0;

  TableauSolver(int rows, int cols, const SimplexOptions& o)
      : tab(rows, cols), reduced(cols + 1, 0.0), cost(cols, 0.0), basis(rows, -1),
        allowed(cols, true), opt(o) {}

  void price_out() {
    const int n = tab.cols();
    for (int j = 0; j <= n; ++j) reduced[j] = j < n ? cost[j] : 0.0;
    for (int r = 0; r < tab.rows(); ++r) {
      const double cb = cost[basis[r]];
      if (cb == 0.0) continue;
      const double* row = tab.row(r);
      for (int j = 0; j <= n; ++j) reduced[j] -= cb * row[j];
    }
  }

  void pivot(int pr, int pc) {
    const int n = tab.cols();
    double* prow = tab.row(pr);
    const double inv = 1.0 / prow[pc];
    for (int j = 0; j <= n; ++j) prow[j] *= inv;
    prow[pc] = 1.0;
    for (int r = 0; r < tab.rows(); ++r) {
      if (r == pr) continue;
      double* row = tab.row(r);
      const double f = row[pc];
      if (f == 0.0) continue;
      for (int j = 0; j <= n; ++j) row[j] -= f * prow[j];
      row[pc] = 0.0;
    }
    const double f = reduced[pc];
    if (f != 0.0) {
      for (int j = 0; j <= n; ++j) reduced[j] -= f * prow[j];
      reduced[pc] = 0.0;
    }
    basis[pr] = pc;
  }

  void run() {
    int degenerate_streak = 0;
    const int n = tab.cols();
    while (true) {
      const bool bland = degenerate_streak >= opt.degenerate_streak_for_bland;
      int enter = -1;
      double best = opt.optimality_tol;
      for (int j = 0; j < n; ++j) {
        if (!allowed[j] || reduced[j] <= opt.optimality_tol) continue;
        if (bland) {
          enter = j;
          break;
        }
        if (reduced[j] > best) {
          best = reduced[j];
          enter = j;
        }
      }
      if (enter < 0) return;

      int leave = -1;
      double theta = std::numeric_limits<double>::infinity();
      for (int r = 0; r < tab.rows(); ++r) {
        const double a = tab.at(r, enter);
        if (a <= opt.pivot_tol) continue;
        const double ratio = std::max(tab.rhs(r), 0.0) / a;
        if (ratio < theta - 1e-12) {
          theta = ratio;
          leave = r;
        } else if (ratio <= theta + 1e-12) {
          if (bland ? basis[r] < basis[leave] : a > tab.at(leave, enter)) leave = r;
        }
      }
      if (leave < 0) throw LpError(LpError::Status::kUnbounded, "LP is unbounded");
      degenerate_streak = theta <= 1e-12 ? degenerate_streak + 1 : 0;
      pivot(leave, enter);
      if (++iterations > opt.max_iterations) {
        throw LpError(LpError::Status::kIterationLimit, "simplex iteration limit reached");
      }
    }
  }
};

}  // namespace

SimplexResult simplex_solve(const DenseLp& lp, const SimplexOptions& opt) {
  const int nv = lp.num_vars;
  const int m = static_cast<int>(lp.rows.size());
  if (static_cast<int>(lp.objective.size()) != nv) {
    throw LpError(LpError::Status::kNumerical, "objective length differs from num_vars");
  }

  // Normalize every row to a non-negative right-hand side.
  std::vector<double> flip(m, 1.0);
  std::vector<RowKind> kind(m);
  int num_slack = 0;
  int num_art = 0;
  for (int r = 0; r < m; ++r) {
    const auto& row = lp.rows[r];
    if (static_cast<int>(row.coeffs.size()) != nv) {
      throw LpError(LpError::Status::kNumerical, "row " + std::to_string(r) + " has wrong length");
    }
    kind[r] = row.kind;
    if (row.rhs < 0.0) {
      flip[r] = -1.0;
      if (row.kind == RowKind::kLessEqual) kind[r] = RowKind::kGreaterEqual;
      else if (row.kind == RowKind::kGreaterEqual) kind[r] = RowKind::kLessEqual;
    }
    if (kind[r] != RowKind::kEqual) ++num_slack;
    if (kind[r] != RowKind::kLessEqual) ++num_art;
  }
  const int ncols = nv + num_slack + num_art;
  TableauSolver s(m, ncols, opt);
  std::vector<int> identity_col(m, -1);
  std::vector<bool> is_art(ncols, false);
  int next_slack = nv;
  int next_art = nv + num_slack;
  for (int r = 0; r < m; ++r) {
    const auto& row = lp.rows[r];
    for (int j = 0; j < nv; ++j) s.tab.at(r, j) = flip[r] * row.coeffs[j];
    s.tab.rhs(r) = flip[r] * row.rhs;
    if (kind[r] == RowKind::kLessEqual) {
      s.tab.at(r, next_slack) = 1.0;
      identity_col[r] = next_slack++;
    } else {
      if (kind[r] == RowKind::kGreaterEqual) s.tab.at(r, next_slack++) = -1.0;
      s.tab.at(r, next_art) = 1.0;
      is_art[next_art] = true;
      identity_col[r] = next_art++;
    }
    s.basis[r] = identity_col[r];
  }

  // Phase 1: maximize -(sum of artificials).
  if (num_art > 0) {
    for (int j = 0; j < ncols; ++j) s.cost[j] = is_art[j] ? -1.0 : 0.0;
    s.price_out();
    s.run();
    double infeas = 0.0;
    for (int r = 0; r < m; ++r) {
      if (is_art[s.basis[r]]) infeas += s.tab.rhs(r);
    }
    if (infeas > opt.feasibility_tol * (1.0 + m)) {
      throw LpError(LpError::Status::kInfeasible, "LP is infeasible");
    }
    // Drive zero-level artificials out of the basis where possible.
    for (int r = 0; r < m; ++r) {
      if (!is_art[s.basis[r]]) continue;
      for (int j = 0; j < ncols; ++j) {
        if (!is_art[j] && std::abs(s.tab.at(r, j)) > opt.pivot_tol) {
          s.pivot(r, j);
          break;
        }
      }
    }
    for (int j = 0; j < ncols; ++j) s.allowed[j] = !is_art[j];
  }

  // Phase 2.
  const double dir = lp.sense == Sense::kMaximize ? 1.0 : -1.0;
  std::fill(s.cost.begin(), s.cost.end(), 0.0);
  for (int j = 0; j < nv; ++j) s.cost[j] = dir * lp.objective[j];
  s.price_out();
  s.run();

  SimplexResult res;
  res.primal.assign(nv, 0.0);
  for (int r = 0; r < m; ++r) {
    if (s.basis[r] < nv) res.primal[s.basis[r]] = std::max(0.0, s.tab.rhs(r));
  }
  res.duals.assign(m, 0.0);
  for (int r = 0; r < m; ++r) {
    double pi = 0.0;
    for (int i = 0; i < m; ++i) pi += s.cost[s.basis[i]] * s.tab.at(i, identity_col[r]);
    res.duals[r] = dir * flip[r] * pi;
  }
  for (int j = 0; j < nv; ++j) res.objective += lp.objective[j] * res.primal[j];
  res.iterations = s.iterations;
  return res;
}

// ---------------------------------------------------------------------------
// Block-angular revised simplex

BlockSimplex::BlockSimplex(int num_blocks, SimplexOptions options)
    : num_blocks_(num_blocks), opt_(options), bslack_pos_(num_blocks, kNonbasic),
      wkey_(num_blocks, 0.0), row_duals_(), block_duals_(num_blocks, 0.0) {}

int BlockSimplex::add_column(int block, double cost, SparseColumn entries) {
  if (block < 0 || block >= num_blocks_) {
    throw LpError(LpError::Status::kNumerical, "column block out of range");
  }
  cols_.push_back({block, cost, std::move(entries)});
  col_pos_.push_back(kNonbasic);
  return num_columns() - 1;
}

int BlockSimplex::add_row(double rhs, const std::vector<std::pair<int, double>>& entries) {
  if (rhs < 0.0) throw LpError(LpError::Status::kNumerical, "coupling rhs must be >= 0");
  const int r = num_rows();
  rhs_.push_back(rhs);
  rslack_pos_.push_back(kNonbasic);
  row_duals_.push_back(0.0);
  for (const auto& [col, coeff] : entries) cols_.at(col).entries.emplace_back(r, coeff);
  return r;
}

int BlockSimplex::block_of(Var v) const {
  switch (v.kind) {
    case Kind::kColumn: return cols_[v.id].block;
    case Kind::kBlockSlack: return v.id;
    default: return -1;
  }
}

double BlockSimplex::cost_of(Var v) const {
  return v.kind == Kind::kColumn ? cols_[v.id].cost : 0.0;
}

void BlockSimplex::axpy(Var v, double scale, std::vector<double>& acc) const {
  if (v.kind == Kind::kColumn) {
    for (const auto& [r, a] : cols_[v.id].entries) acc[r] += scale * a;
  } else if (v.kind == Kind::kRowSlack) {
    acc[v.id] += scale;
  }
}

double BlockSimplex::dot(Var v, const std::vector<double>& y) const {
  if (v.kind == Kind::kColumn) {
    double s = 0.0;
    for (const auto& [r, a] : cols_[v.id].entries) s += a * y[r];
    return s;
  }
  return v.kind == Kind::kRowSlack ? y[v.id] : 0.0;
}

int& BlockSimplex::position(Var v) {
  switch (v.kind) {
    case Kind::kColumn: return col_pos_[v.id];
    case Kind::kBlockSlack: return bslack_pos_[v.id];
    default: return rslack_pos_[v.id];
  }
}

int BlockSimplex::position(Var v) const {
  return const_cast<BlockSimplex*>(this)->position(v);
}

long BlockSimplex::order_key(Var v) const {
  return static_cast<long>(v.kind) * (1L << 40) + v.id;
}

double BlockSimplex::primal(int column) const {
  const int p = col_pos_.at(column);
  if (!basis_valid_ || p == kNonbasic) return 0.0;
  if (p == kKey) return std::max(0.0, x_key_[cols_[column].block]);
  return std::max(0.0, x_slot_[p]);
}

double BlockSimplex::block_slack(int block) const {
  const int p = bslack_pos_.at(block);
  if (!basis_valid_) return 1.0;
  if (p == kNonbasic) return 0.0;
  if (p == kKey) return std::max(0.0, x_key_[block]);
  return std::max(0.0, x_slot_[p]);
}

void BlockSimplex::reset_basis() {
  const int m = num_rows();
  std::fill(col_pos_.begin(), col_pos_.end(), kNonbasic);
  key_.assign(num_blocks_, Var{Kind::kBlockSlack, 0});
  for (int k = 0; k < num_blocks_; ++k) {
    key_[k] = Var{Kind::kBlockSlack, k};
    bslack_pos_[k] = kKey;
  }
  slot_.assign(m, Var{Kind::kRowSlack, 0});
  for (int r = 0; r < m; ++r) {
    slot_[r] = Var{Kind::kRowSlack, r};
    rslack_pos_[r] = r;
  }
  x_key_.assign(num_blocks_, 1.0);
  x_slot_ = rhs_;
  winv_.assign(static_cast<std::size_t>(m) * m, 0.0);
  for (int r = 0; r < m; ++r) winv_[static_cast<std::size_t>(r) * m + r] = 1.0;
  basis_rows_ = m;
  updates_since_refactor_ = 0;
  basis_valid_ = true;
}

void BlockSimplex::extend_basis() {
  const int m_old = basis_rows_;
  const int m = num_rows();
  if (m == m_old) return;
  // W' = [[W, 0], [U, I]] with U the new-row part of the old slot columns, so
  // W'^-1 = [[W^-1, 0], [-U W^-1, I]].
  std::vector<double> inv(static_cast<std::size_t>(m) * m, 0.0);
  for (int r = 0; r < m_old; ++r) {
    std::copy_n(&winv_[static_cast<std::size_t>(r) * m_old], m_old, &inv[static_cast<std::size_t>(r) * m]);
  }
  std::vector<double> col(m);
  for (int s = 0; s < m_old; ++s) {
    std::fill(col.begin() + m_old, col.end(), 0.0);
    axpy(slot_[s], 1.0, col);
    const int k = block_of(slot_[s]);
    if (k >= 0) axpy(key_[k], -1.0, col);
    const double* src = &winv_[static_cast<std::size_t>(s) * m_old];
    for (int r = m_old; r < m; ++r) {
      const double u = col[r];
      if (u == 0.0) continue;
      double* dst = &inv[static_cast<std::size_t>(r) * m];
      for (int c = 0; c < m_old; ++c) dst[c] -= u * src[c];
    }
  }
  for (int r = m_old; r < m; ++r) {
    inv[static_cast<std::size_t>(r) * m + r] = 1.0;
    slot_.push_back(Var{Kind::kRowSlack, r});
    rslack_pos_[r] = r;
  }
  winv_ = std::move(inv);
  x_slot_.resize(m);
  basis_rows_ = m;
  recompute_values();
}

void BlockSimplex::recompute_values() {
  const int m = basis_rows_;
  // W x_slot = b - sum_k a(key_k); x_key = 1 - sum of block slots.
  std::vector<double> b = rhs_;
  for (int k = 0; k < num_blocks_; ++k) axpy(key_[k], -1.0, b);
  for (int s = 0; s < m; ++s) {
    const double* row = &winv_[static_cast<std::size_t>(s) * m];
    double v = 0.0;
    for (int r = 0; r < m; ++r) v += row[r] * b[r];
    x_slot_[s] = v;
  }
  std::fill(x_key_.begin(), x_key_.end(), 1.0);
  for (int s = 0; s < m; ++s) {
    const int k = block_of(slot_[s]);
    if (k >= 0) x_key_[k] -= x_slot_[s];
  }
}

void BlockSimplex::refactor() {
  const int m = basis_rows_;
  updates_since_refactor_ = 0;
  if (m > 0) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(m, m);
    std::vector<double> col(m);
    for (int s = 0; s < m; ++s) {
      std::fill(col.begin(), col.end(), 0.0);
      axpy(slot_[s], 1.0, col);
      const int k = block_of(slot_[s]);
      if (k >= 0) axpy(key_[k], -1.0, col);
      for (int r = 0; r < m; ++r) w(r, s) = col[r];
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(w);
    const Eigen::MatrixXd inv = lu.inverse();
    if (!inv.allFinite()) throw LpError(LpError::Status::kNumerical, "singular working basis");
    for (int r = 0; r < m; ++r) {
      for (int c = 0; c < m; ++c) winv_[static_cast<std::size_t>(r) * m + c] = inv(r, c);
    }
  }
  recompute_values();
}

void BlockSimplex::compute_duals() {
  const int m = basis_rows_;
  std::vector<double> chat(m);
  for (int s = 0; s < m; ++s) {
    const int k = block_of(slot_[s]);
    chat[s] = cost_of(slot_[s]) - (k >= 0 ? cost_of(key_[k]) : 0.0);
  }
  std::fill(row_duals_.begin(), row_duals_.end(), 0.0);
  for (int s = 0; s < m; ++s) {
    if (chat[s] == 0.0) continue;
    const double* row = &winv_[static_cast<std::size_t>(s) * m];
    for (int r = 0; r < m; ++r) row_duals_[r] += chat[s] * row[r];
  }
  for (int k = 0; k < num_blocks_; ++k) {
    block_duals_[k] = cost_of(key_[k]) - dot(key_[k], row_duals_);
  }
}

double BlockSimplex::reduced_cost(Var v) const {
  switch (v.kind) {
    case Kind::kColumn: {
      const auto& c = cols_[v.id];
      return c.cost - block_duals_[c.block] - dot(v, row_duals_);
    }
    case Kind::kBlockSlack: return -block_duals_[v.id];
    default: return -row_duals_[v.id];
  }
}

void BlockSimplex::compute_direction(Var enter) {
  const int m = basis_rows_;
  const int kq = block_of(enter);
  std::vector<double> v(m, 0.0);
  axpy(enter, 1.0, v);
  if (kq >= 0) axpy(key_[kq], -1.0, v);
  w_.assign(m, 0.0);
  for (int s = 0; s < m; ++s) {
    const double* row = &winv_[static_cast<std::size_t>(s) * m];
    double acc = 0.0;
    for (int r = 0; r < m; ++r) acc += row[r] * v[r];
    w_[s] = acc;
  }
  for (int k : touched_) wkey_[k] = 0.0;
  touched_.clear();
  if (kq >= 0) {
    wkey_[kq] = 1.0;
    touched_.push_back(kq);
  }
  for (int s = 0; s < m; ++s) {
    const int k = block_of(slot_[s]);
    if (k < 0 || w_[s] == 0.0) continue;
    if (std::find(touched_.begin(), touched_.end(), k) == touched_.end()) touched_.push_back(k);
    wkey_[k] -= w_[s];
  }
}

void BlockSimplex::pivot_replace_slot(int slot, const std::vector<double>& w) {
  const int m = basis_rows_;
  double* prow = &winv_[static_cast<std::size_t>(slot) * m];
  const double inv = 1.0 / w[slot];
  for (int c = 0; c < m; ++c) prow[c] *= inv;
  for (int s = 0; s < m; ++s) {
    if (s == slot || w[s] == 0.0) continue;
    double* row = &winv_[static_cast<std::size_t>(s) * m];
    const double f = w[s];
    for (int c = 0; c < m; ++c) row[c] -= f * prow[c];
  }
}

void BlockSimplex::apply_pivot(Var enter, double theta, int leave_slot, int leave_block) {
  const int m = basis_rows_;
  const int kq = block_of(enter);
  for (int s = 0; s < m; ++s) x_slot_[s] -= theta * w_[s];
  for (int k : touched_) x_key_[k] -= theta * wkey_[k];

  if (leave_slot >= 0) {
    position(slot_[leave_slot]) = kNonbasic;
    slot_[leave_slot] = enter;
    position(enter) = leave_slot;
    x_slot_[leave_slot] = theta;
    pivot_replace_slot(leave_slot, w_);
  } else {
    const int k = leave_block;
    std::vector<int> slots_k;
    for (int s = 0; s < m; ++s) {
      if (block_of(slot_[s]) == k) slots_k.push_back(s);
    }
    position(key_[k]) = kNonbasic;
    if (slots_k.empty()) {
      key_[k] = enter;
      position(enter) = kKey;
      x_key_[k] = theta;
    } else if (kq == k) {
      // The entering variable becomes the key; block-k slot columns shift by
      // -(a_q - a_old_key), a rank-one change of W (Sherman-Morrison).
      std::vector<double> sum_rows(m, 0.0);
      for (int s : slots_k) {
        const double* row = &winv_[static_cast<std::size_t>(s) * m];
        for (int c = 0; c < m; ++c) sum_rows[c] += row[c];
      }
      const double denom = wkey_[k];
      for (int s = 0; s < m; ++s) {
        if (w_[s] == 0.0) continue;
        double* row = &winv_[static_cast<std::size_t>(s) * m];
        const double f = w_[s] / denom;
        for (int c = 0; c < m; ++c) row[c] += f * sum_rows[c];
      }
      key_[k] = enter;
      position(enter) = kKey;
      x_key_[k] = theta;
    } else {
      // Promote the variable in the first block-k slot to key, then give
      // that slot to the entering variable.
      const int s0 = slots_k.front();
      double* row0 = &winv_[static_cast<std::size_t>(s0) * m];
      double w0 = w_[s0];
      for (std::size_t idx = 1; idx < slots_k.size(); ++idx) {
        const int s = slots_k[idx];
        const double* row = &winv_[static_cast<std::size_t>(s) * m];
        for (int c = 0; c < m; ++c) row0[c] += row[c];
        w0 += w_[s];
      }
      const Var promoted = slot_[s0];
      key_[k] = promoted;
      position(promoted) = kKey;
      x_key_[k] = x_slot_[s0];
      slot_[s0] = enter;
      position(enter) = s0;
      x_slot_[s0] = theta;
      w_[s0] = w0;
      pivot_replace_slot(s0, w_);
    }
  }
  if (++updates_since_refactor_ >= 50) refactor();
}

void BlockSimplex::count_iteration(int& iterations) {
  if (++iterations > opt_.max_iterations) {
    throw LpError(LpError::Status::kIterationLimit, "block simplex iteration limit reached");
  }
}

bool BlockSimplex::dual_feasible() {
  compute_duals();
  for (int j = 0; j < num_columns(); ++j) {
    if (col_pos_[j] == kNonbasic && reduced_cost(Var{Kind::kColumn, j}) > opt_.optimality_tol) {
      return false;
    }
  }
  for (int k = 0; k < num_blocks_; ++k) {
    if (bslack_pos_[k] == kNonbasic && -block_duals_[k] > opt_.optimality_tol) return false;
  }
  for (int r = 0; r < basis_rows_; ++r) {
    if (rslack_pos_[r] == kNonbasic && -row_duals_[r] > opt_.optimality_tol) return false;
  }
  return true;
}

void BlockSimplex::primal_phase(int& iterations) {
  const int m = basis_rows_;
  int degenerate_streak = 0;
  while (true) {
    compute_duals();
    const bool bland = degenerate_streak >= opt_.degenerate_streak_for_bland;

    Var enter{Kind::kColumn, -1};
    double best = opt_.optimality_tol;
    bool found = false;
    auto consider = [&](Var cand) {
      const double d = reduced_cost(cand);
      if (d <= opt_.optimality_tol) return;
      if (bland) {
        if (!found || order_key(cand) < order_key(enter)) {
          enter = cand;
          found = true;
        }
      } else if (d > best) {
        best = d;
        enter = cand;
        found = true;
      }
    };
    for (int j = 0; j < num_columns(); ++j) {
      if (col_pos_[j] == kNonbasic) consider(Var{Kind::kColumn, j});
    }
    for (int k = 0; k < num_blocks_; ++k) {
      if (bslack_pos_[k] == kNonbasic) consider(Var{Kind::kBlockSlack, k});
    }
    for (int r = 0; r < m; ++r) {
      if (rslack_pos_[r] == kNonbasic) consider(Var{Kind::kRowSlack, r});
    }
    if (!found) return;

    compute_direction(enter);
    double theta = std::numeric_limits<double>::infinity();
    int leave_slot = -1;
    int leave_block = -1;
    double leave_mag = 0.0;
    Var leave_var{Kind::kColumn, -1};
    auto take = [&](double ratio, double mag, Var var, int slot, int block) {
      bool replace = false;
      if (ratio < theta - 1e-12) {
        replace = true;
      } else if (ratio <= theta + 1e-12) {
        replace = bland ? order_key(var) < order_key(leave_var) : mag > leave_mag;
      }
      if (replace) {
        theta = std::min(theta, ratio);
        leave_slot = slot;
        leave_block = block;
        leave_mag = mag;
        leave_var = var;
      }
    };
    for (int s = 0; s < m; ++s) {
      if (w_[s] > opt_.pivot_tol) take(std::max(x_slot_[s], 0.0) / w_[s], w_[s], slot_[s], s, -1);
    }
    for (int k : touched_) {
      if (wkey_[k] > opt_.pivot_tol) {
        take(std::max(x_key_[k], 0.0) / wkey_[k], wkey_[k], key_[k], -1, k);
      }
    }
    if (leave_slot < 0 && leave_block < 0) {
      throw LpError(LpError::Status::kUnbounded, "block LP is unbounded");
    }
    theta = std::max(theta, 0.0);
    degenerate_streak = theta <= 1e-12 ? degenerate_streak + 1 : 0;
    apply_pivot(enter, theta, leave_slot, leave_block);
    count_iteration(iterations);
  }
}

void BlockSimplex::dual_phase(int& iterations) {
  const int m = basis_rows_;
  std::vector<double> rho(m);
  while (true) {
    // Leaving: the most negative basic value.
    int leave_slot = -1;
    int leave_block = -1;
    double worst = -opt_.feasibility_tol;
    for (int s = 0; s < m; ++s) {
      if (x_slot_[s] < worst) {
        worst = x_slot_[s];
        leave_slot = s;
        leave_block = -1;
      }
    }
    for (int k = 0; k < num_blocks_; ++k) {
      if (x_key_[k] < worst) {
        worst = x_key_[k];
        leave_slot = -1;
        leave_block = k;
      }
    }
    if (leave_slot < 0 && leave_block < 0) return;

    // rho . (a_j - a_key) is the leaving variable's entry in column j (for a
    // key leaving, its entry is [block j == k] minus that).
    std::fill(rho.begin(), rho.end(), 0.0);
    if (leave_slot >= 0) {
      std::copy_n(&winv_[static_cast<std::size_t>(leave_slot) * m], m, rho.begin());
    } else {
      for (int s = 0; s < m; ++s) {
        if (block_of(slot_[s]) != leave_block) continue;
        const double* row = &winv_[static_cast<std::size_t>(s) * m];
        for (int c = 0; c < m; ++c) rho[c] += row[c];
      }
    }
    std::vector<double> key_dot(num_blocks_);
    for (int k = 0; k < num_blocks_; ++k) key_dot[k] = dot(key_[k], rho);
    auto alpha = [&](Var v) {
      const int kv = block_of(v);
      const double a = dot(v, rho) - (kv >= 0 ? key_dot[kv] : 0.0);
      if (leave_slot >= 0) return a;
      return (kv == leave_block ? 1.0 : 0.0) - a;
    };

    compute_duals();
    Var enter{Kind::kColumn, -1};
    double best_ratio = std::numeric_limits<double>::infinity();
    double best_mag = 0.0;
    bool found = false;
    auto consider = [&](Var cand) {
      const double a = alpha(cand);
      if (a >= -opt_.pivot_tol) return;
      const double ratio = std::max(0.0, -reduced_cost(cand)) / -a;
      if (ratio < best_ratio - 1e-12 || (ratio <= best_ratio + 1e-12 && -a > best_mag)) {
        best_ratio = std::min(best_ratio, ratio);
        best_mag = -a;
        enter = cand;
        found = true;
      }
    };
    for (int j = 0; j < num_columns(); ++j) {
      if (col_pos_[j] == kNonbasic) consider(Var{Kind::kColumn, j});
    }
    for (int k = 0; k < num_blocks_; ++k) {
      if (bslack_pos_[k] == kNonbasic) consider(Var{Kind::kBlockSlack, k});
    }
    for (int r = 0; r < m; ++r) {
      if (rslack_pos_[r] == kNonbasic) consider(Var{Kind::kRowSlack, r});
    }
    if (!found) throw LpError(LpError::Status::kInfeasible, "block LP is infeasible");

    compute_direction(enter);
    const double w_leave = leave_slot >= 0 ? w_[leave_slot] : wkey_[leave_block];
    if (w_leave >= 0.0) throw LpError(LpError::Status::kNumerical, "dual pivot sign mismatch");
    const double theta = worst / w_leave;
    apply_pivot(enter, theta, leave_slot, leave_block);
    count_iteration(iterations);
  }
}

void BlockSimplex::solve() {
  int iterations = 0;
  if (!basis_valid_) {
    reset_basis();
  } else if (basis_rows_ < num_rows()) {
    extend_basis();
    if (dual_feasible()) {
      dual_phase(iterations);
    } else {
      reset_basis();
    }
  }
  primal_phase(iterations);
  total_iterations_ += iterations;
  compute_duals();
  objective_ = 0.0;
  for (int j = 0; j < num_columns(); ++j) objective_ += cols_[j].cost * primal(j);
}

}  // namespace reuse_assort
