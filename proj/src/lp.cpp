#include "reuse_assort/lp.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "json.hpp"
#include "reuse_assort/errors.hpp"
#include "reuse_assort/simplex.hpp"

namespace reuse_assort {

namespace {

// Fraction of a unit allocated k periods ago that is still out, per
// (type, product): table[z * n + i][k] for k = 0..T.
std::vector<std::vector<double>> survival_tables(const Instance& inst) {
  const int n = inst.num_products();
  const int T = inst.horizon();
  std::vector<std::vector<double>> out(static_cast<std::size_t>(inst.num_types()) * n);
  for (int z = 0; z < inst.num_types(); ++z) {
    for (int i = 0; i < n; ++i) {
      auto& row = out[static_cast<std::size_t>(z) * n + i];
      row.resize(T + 1);
      for (int k = 0; k <= T; ++k) row[k] = inst.type(z).durations[i].survival(k);
    }
  }
  return out;
}

// (t, z) pairs with positive arrival probability; each is one block of the
// master problem.
struct Blocks {
  std::vector<std::pair<int, int>> tz;
  std::vector<int> index;  // (t - 1) * Z + z -> block or -1
};

Blocks make_blocks(const Instance& inst) {
  Blocks b;
  const int Z = inst.num_types();
  b.index.assign(static_cast<std::size_t>(inst.horizon()) * Z, -1);
  for (int t = 1; t <= inst.horizon(); ++t) {
    for (int z = 0; z < Z; ++z) {
      if (inst.arrival_prob(t, z) > 0.0) {
        b.index[static_cast<std::size_t>(t - 1) * Z + z] = static_cast<int>(b.tz.size());
        b.tz.emplace_back(t, z);
      }
    }
  }
  return b;
}

// Pads each group with the empty assortment, clips noise and fills the
// contribution vector. Duals are passed through.
LpSolution finalize(const Instance& inst, std::vector<LpColumn> cols,
                    std::vector<std::vector<double>> theta,
                    std::vector<std::vector<double>> lambda) {
  const int T = inst.horizon();
  const int Z = inst.num_types();
  const int n = inst.num_products();
  std::vector<double> mass(static_cast<std::size_t>(T) * Z, 0.0);
  std::vector<LpColumn> kept;
  kept.reserve(cols.size() + mass.size());
  for (auto& c : cols) {
    if (c.y < 0.0) c.y = 0.0;
    if (c.set.empty() || c.y <= 0.0) continue;
    mass[static_cast<std::size_t>(c.t - 1) * Z + c.type] += c.y;
    kept.push_back(c);
  }
  for (int t = 1; t <= T; ++t) {
    for (int z = 0; z < Z; ++z) {
      if (inst.arrival_prob(t, z) <= 0.0) continue;
      const double pad = 1.0 - mass[static_cast<std::size_t>(t - 1) * Z + z];
      if (pad > 0.0) kept.push_back({t, z, ProductSet{}, pad});
    }
  }
  LpSolution sol(T, Z, std::move(kept));
  sol.theta = std::move(theta);
  sol.lambda = std::move(lambda);
  sol.contrib.assign(n, 0.0);
  std::vector<double> phi(n);
  for (const auto& c : sol.columns()) {
    if (c.set.empty()) continue;
    const auto& ty = inst.type(c.type);
    ty.choice.probs(c.set, phi);
    const double f = inst.arrival_prob(c.t, c.type);
    c.set.for_each([&](int i) { sol.contrib[i] += f * c.y * phi[i] * ty.fees[i]; });
  }
  sol.objective = 0.0;
  for (double v : sol.contrib) sol.objective += v;
  return sol;
}

// usage[i][t - 1] from per-(type, product, period) allocation rates.
std::vector<std::vector<double>> usage_from_rates(const Instance& inst,
                                                  const std::vector<std::vector<double>>& surv,
                                                  const std::vector<std::vector<double>>& rate) {
  const int n = inst.num_products();
  const int T = inst.horizon();
  std::vector<std::vector<double>> usage(n, std::vector<double>(T, 0.0));
  for (int z = 0; z < inst.num_types(); ++z) {
    for (int i = 0; i < n; ++i) {
      const auto& a = rate[static_cast<std::size_t>(z) * n + i];
      const auto& g = surv[static_cast<std::size_t>(z) * n + i];
      for (int tau = 1; tau <= T; ++tau) {
        const double r = a[tau - 1];
        if (r == 0.0) continue;
        for (int t = tau; t <= T; ++t) {
          const double s = g[t - tau];
          if (s == 0.0) break;  // survival is non-increasing
          usage[i][t - 1] += r * s;
        }
      }
    }
  }
  return usage;
}

}  // namespace

LpSolution::LpSolution(int horizon, int num_types, std::vector<LpColumn> columns)
    : horizon_(horizon), num_types_(num_types), columns_(std::move(columns)) {
  // Stable sort keeps the empty pad behind the generated columns of a group.
  std::stable_sort(columns_.begin(), columns_.end(), [](const LpColumn& a, const LpColumn& b) {
    return a.t != b.t ? a.t < b.t : a.type < b.type;
  });
  const std::size_t groups = static_cast<std::size_t>(horizon) * num_types;
  offsets_.assign(groups + 1, 0);
  for (const auto& c : columns_) ++offsets_[static_cast<std::size_t>(c.t - 1) * num_types + c.type + 1];
  for (std::size_t g = 0; g < groups; ++g) offsets_[g + 1] += offsets_[g];
}

std::span<const LpColumn> LpSolution::columns_for(int t, int type) const {
  if (t < 1 || t > horizon_ || type < 0 || type >= num_types_) return {};
  const std::size_t g = static_cast<std::size_t>(t - 1) * num_types_ + type;
  return std::span<const LpColumn>(columns_).subspan(offsets_[g], offsets_[g + 1] - offsets_[g]);
}

double LpSolution::dual_objective(const Instance& inst) const {
  double total = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    for (double v : theta[i]) total += inst.inventory(static_cast<int>(i)) * v;
  }
  for (const auto& row : lambda) {
    for (double v : row) total += v;
  }
  return total;
}

LpSolution solve_expected_lp(const Instance& inst, const LpOptions& opt) {
  const int n = inst.num_products();
  const int T = inst.horizon();
  const int Z = inst.num_types();
  const auto surv = survival_tables(inst);
  const Blocks blocks = make_blocks(inst);
  const int K = static_cast<int>(blocks.tz.size());

  BlockSimplex master(K);
  struct Generated {
    int block;
    ProductSet set;
    std::vector<double> phi;
  };
  std::vector<Generated> gen;
  std::vector<std::vector<ProductSet>> sets_in_block(K);
  std::vector<std::vector<int>> row_id(n, std::vector<int>(T + 1, -1));
  std::vector<std::vector<int>> active(n);  // periods with a row, per product

  auto add_column = [&](int k, ProductSet s) {
    const auto [t, z] = blocks.tz[k];
    const auto& ty = inst.type(z);
    const double f = inst.arrival_prob(t, z);
    std::vector<double> phi(n, 0.0);
    ty.choice.probs(s, phi);
    double cost = 0.0;
    BlockSimplex::SparseColumn entries;
    for (int i = 0; i < n; ++i) {
      if (phi[i] <= 0.0) continue;
      cost += f * ty.fees[i] * phi[i];
      const auto& g = surv[static_cast<std::size_t>(z) * n + i];
      for (int tp : active[i]) {
        if (tp < t) continue;
        const double coeff = f * g[tp - t] * phi[i];
        if (coeff > 0.0) entries.emplace_back(row_id[i][tp], coeff);
      }
    }
    master.add_column(k, cost, std::move(entries));
    gen.push_back({k, s, std::move(phi)});
    sets_in_block[k].push_back(s);
  };

  auto add_row = [&](int i, int tp) {
    std::vector<std::pair<int, double>> entries;
    for (int j = 0; j < static_cast<int>(gen.size()); ++j) {
      const auto& col = gen[j];
      const auto [t, z] = blocks.tz[col.block];
      if (t > tp || col.phi[i] <= 0.0) continue;
      const double coeff =
          inst.arrival_prob(t, z) * surv[static_cast<std::size_t>(z) * n + i][tp - t] * col.phi[i];
      if (coeff > 0.0) entries.emplace_back(j, coeff);
    }
    row_id[i][tp] = master.add_row(inst.inventory(i), entries);
    active[i].push_back(tp);
  };

  std::vector<std::vector<double>> rate(static_cast<std::size_t>(Z) * n, std::vector<double>(T, 0.0));
  std::vector<double> weights(n);
  double max_rc = 0.0;
  double max_viol = 0.0;
  int iter = 0;
  bool converged = false;
  while (iter < opt.max_iters) {
    ++iter;
    master.solve();

    // Row generation from plug-back usage. Within each run of consecutive
    // violated periods only the most violated one is added; the others tend
    // to be fixed by it.
    for (auto& r : rate) std::fill(r.begin(), r.end(), 0.0);
    for (int j = 0; j < static_cast<int>(gen.size()); ++j) {
      const double y = master.primal(j);
      if (y <= 0.0) continue;
      const auto [t, z] = blocks.tz[gen[j].block];
      const double f = inst.arrival_prob(t, z);
      for (int i = 0; i < n; ++i) {
        if (gen[j].phi[i] > 0.0) rate[static_cast<std::size_t>(z) * n + i][t - 1] += f * y * gen[j].phi[i];
      }
    }
    const auto usage = usage_from_rates(inst, surv, rate);
    int rows_added = 0;
    max_viol = 0.0;
    for (int i = 0; i < n; ++i) {
      const double cap = inst.inventory(i);
      int best_t = -1;
      double best_v = 0.0;
      for (int t = 1; t <= T + 1; ++t) {
        const double v = t <= T ? usage[i][t - 1] - cap : -1.0;
        if (v > opt.row_violation_tol && row_id[i][t] < 0) {
          max_viol = std::max(max_viol, v);
          if (best_t < 0 || v > best_v) {
            best_t = t;
            best_v = v;
          }
        } else if (best_t >= 0) {
          add_row(i, best_t);
          ++rows_added;
          best_t = -1;
        }
      }
    }
    if (rows_added > 0) continue;

    // Pricing: one oracle call per block.
    max_rc = 0.0;
    int cols_added = 0;
    for (int k = 0; k < K; ++k) {
      const auto [t, z] = blocks.tz[k];
      const auto& ty = inst.type(z);
      const double f = inst.arrival_prob(t, z);
      for (int i = 0; i < n; ++i) {
        double shadow = 0.0;
        const auto& g = surv[static_cast<std::size_t>(z) * n + i];
        for (int tp : active[i]) {
          if (tp >= t) shadow += g[tp - t] * master.row_dual(row_id[i][tp]);
        }
        weights[i] = f * (ty.fees[i] - shadow);
      }
      const ProductSet s = offline_oracle(ty.choice, weights, inst.family());
      if (s.empty()) continue;
      const double rc = assortment_value(ty.choice, weights, s) - master.block_dual(k);
      max_rc = std::max(max_rc, rc);
      if (rc <= opt.reduced_cost_tol) continue;
      const auto& existing = sets_in_block[k];
      if (std::find(existing.begin(), existing.end(), s) != existing.end()) continue;
      add_column(k, s);
      ++cols_added;
    }
    if (cols_added == 0) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::ostringstream os;
    os << "column generation did not converge in " << opt.max_iters
       << " iterations (master objective " << master.objective() << ", max reduced cost "
       << max_rc << ", max row violation " << max_viol << ")";
    throw LpError(LpError::Status::kIterationLimit, os.str());
  }

  std::vector<LpColumn> cols;
  cols.reserve(gen.size());
  for (int j = 0; j < static_cast<int>(gen.size()); ++j) {
    const auto [t, z] = blocks.tz[gen[j].block];
    cols.push_back({t, z, gen[j].set, master.primal(j)});
  }
  std::vector<std::vector<double>> theta(n, std::vector<double>(T, 0.0));
  int num_rows = 0;
  for (int i = 0; i < n; ++i) {
    for (int tp : active[i]) {
      theta[i][tp - 1] = std::max(0.0, master.row_dual(row_id[i][tp]));
      ++num_rows;
    }
  }
  std::vector<std::vector<double>> lambda(T, std::vector<double>(Z, 0.0));
  for (int k = 0; k < K; ++k) {
    const auto [t, z] = blocks.tz[k];
    lambda[t - 1][z] = std::max(0.0, master.block_dual(k));
  }
  LpSolution sol = finalize(inst, std::move(cols), std::move(theta), std::move(lambda));
  sol.iterations = iter;
  sol.inventory_rows = num_rows;
  sol.max_reduced_cost = max_rc;
  sol.max_row_violation = max_viol;
  return sol;
}

LpSolution full_enumeration_lp(const Instance& inst) {
  const int n = inst.num_products();
  const int T = inst.horizon();
  const int Z = inst.num_types();
  if (n > 20) throw GuardError("lp", "full enumeration needs at most 20 products");
  std::vector<ProductSet> sets;
  for (std::uint32_t bits = 1; bits < (1u << n); ++bits) {
    ProductSet s = ProductSet(bits);
    if (inst.family().contains(s)) sets.push_back(s);
  }
  const double size = static_cast<double>(sets.size()) * T * Z;
  if (size > 50'000) {
    throw GuardError("lp", "full enumeration guard exceeded (" + std::to_string((long long)size) +
                               " > 50000 columns)");
  }
  const auto surv = survival_tables(inst);
  const Blocks blocks = make_blocks(inst);
  const int K = static_cast<int>(blocks.tz.size());
  const int num_vars = K * static_cast<int>(sets.size());

  DenseLp lp;
  lp.num_vars = num_vars;
  lp.objective.assign(num_vars, 0.0);
  lp.sense = Sense::kMaximize;
  lp.rows.resize(static_cast<std::size_t>(n) * T + K);
  for (int i = 0; i < n; ++i) {
    for (int t = 1; t <= T; ++t) {
      auto& row = lp.rows[static_cast<std::size_t>(i) * T + (t - 1)];
      row.coeffs.assign(num_vars, 0.0);
      row.rhs = inst.inventory(i);
    }
  }
  std::vector<double> phi(n);
  for (int k = 0; k < K; ++k) {
    const auto [t, z] = blocks.tz[k];
    const auto& ty = inst.type(z);
    const double f = inst.arrival_prob(t, z);
    auto& conv = lp.rows[static_cast<std::size_t>(n) * T + k];
    conv.coeffs.assign(num_vars, 0.0);
    conv.rhs = 1.0;
    for (int s = 0; s < static_cast<int>(sets.size()); ++s) {
      const int var = k * static_cast<int>(sets.size()) + s;
      conv.coeffs[var] = 1.0;
      ty.choice.probs(sets[s], phi);
      for (int i = 0; i < n; ++i) {
        if (phi[i] <= 0.0) continue;
        lp.objective[var] += f * ty.fees[i] * phi[i];
        const auto& g = surv[static_cast<std::size_t>(z) * n + i];
        for (int tp = t; tp <= T; ++tp) {
          lp.rows[static_cast<std::size_t>(i) * T + (tp - 1)].coeffs[var] = f * g[tp - t] * phi[i];
        }
      }
    }
  }
  const SimplexResult res = simplex_solve(lp);

  std::vector<LpColumn> cols;
  for (int k = 0; k < K; ++k) {
    const auto [t, z] = blocks.tz[k];
    for (int s = 0; s < static_cast<int>(sets.size()); ++s) {
      const double y = res.primal[k * sets.size() + s];
      if (y > 0.0) cols.push_back({t, z, sets[s], y});
    }
  }
  std::vector<std::vector<double>> theta(n, std::vector<double>(T, 0.0));
  for (int i = 0; i < n; ++i) {
    for (int t = 1; t <= T; ++t) {
      theta[i][t - 1] = std::max(0.0, res.duals[static_cast<std::size_t>(i) * T + (t - 1)]);
    }
  }
  std::vector<std::vector<double>> lambda(T, std::vector<double>(Z, 0.0));
  for (int k = 0; k < K; ++k) {
    const auto [t, z] = blocks.tz[k];
    lambda[t - 1][z] = std::max(0.0, res.duals[static_cast<std::size_t>(n) * T + k]);
  }
  LpSolution sol = finalize(inst, std::move(cols), std::move(theta), std::move(lambda));
  sol.iterations = res.iterations;
  sol.inventory_rows = n * T;
  return sol;
}

std::vector<std::vector<double>> plug_back_usage_table(const Instance& inst,
                                                       const LpSolution& sol) {
  const int n = inst.num_products();
  const int T = inst.horizon();
  std::vector<std::vector<double>> rate(static_cast<std::size_t>(inst.num_types()) * n,
                                        std::vector<double>(T, 0.0));
  std::vector<double> phi(n);
  for (const auto& c : sol.columns()) {
    if (c.set.empty() || c.y <= 0.0) continue;
    inst.type(c.type).choice.probs(c.set, phi);
    const double f = inst.arrival_prob(c.t, c.type);
    c.set.for_each([&](int i) {
      rate[static_cast<std::size_t>(c.type) * n + i][c.t - 1] += f * c.y * phi[i];
    });
  }
  return usage_from_rates(inst, survival_tables(inst), rate);
}

double plug_back_usage(const Instance& inst, const LpSolution& sol, int product, int t) {
  if (product < 0 || product >= inst.num_products() || t < 1 || t > inst.horizon()) {
    throw std::out_of_range("plug_back_usage: (product, t) out of range");
  }
  double total = 0.0;
  for (const auto& c : sol.columns()) {
    if (c.t > t || c.y <= 0.0 || !c.set.contains(product)) continue;
    const auto& ty = inst.type(c.type);
    total += inst.arrival_prob(c.t, c.type) * ty.durations[product].survival(t - c.t) *
             ty.choice.prob(c.set, product) * c.y;
  }
  return total;
}

std::optional<std::string> find_solution_violation(const Instance& inst, const LpSolution& sol) {
  const int T = inst.horizon();
  const int Z = inst.num_types();
  std::vector<double> mass(static_cast<std::size_t>(T) * Z, 0.0);
  for (const auto& c : sol.columns()) {
    if (c.t < 1 || c.t > T || c.type < 0 || c.type >= Z) return "column index out of range";
    if (inst.arrival_prob(c.t, c.type) <= 0.0) return "column on a zero-probability arrival";
    if (!inst.family().contains(c.set)) return "infeasible assortment " + c.set.to_string();
    if (c.y < -1e-9) return "negative y " + std::to_string(c.y);
    mass[static_cast<std::size_t>(c.t - 1) * Z + c.type] += c.y;
  }
  for (int t = 1; t <= T; ++t) {
    for (int z = 0; z < Z; ++z) {
      if (inst.arrival_prob(t, z) <= 0.0) continue;
      const double m = mass[static_cast<std::size_t>(t - 1) * Z + z];
      if (std::abs(m - 1.0) > 1e-9) {
        return "mass " + std::to_string(m) + " at (t=" + std::to_string(t) +
               ", z=" + std::to_string(z) + ")";
      }
    }
  }
  const auto usage = plug_back_usage_table(inst, sol);
  for (int i = 0; i < inst.num_products(); ++i) {
    for (int t = 1; t <= T; ++t) {
      if (usage[i][t - 1] > inst.inventory(i) + 1e-6) {
        return "usage " + std::to_string(usage[i][t - 1]) + " exceeds inventory of product " +
               std::to_string(i) + " at t=" + std::to_string(t);
      }
    }
  }
  double sum = 0.0;
  for (double v : sol.contrib) sum += v;
  if (std::abs(sum - sol.objective) > 1e-8) return "contributions do not sum to the objective";
  return std::nullopt;
}

std::string lp_solution_to_json(const LpSolution& sol, int indent) {
  using nlohmann::json;
  json j;
  j["objective"] = sol.objective;
  j["contrib"] = sol.contrib;
  json cols = json::array();
  for (const auto& c : sol.columns()) {
    cols.push_back({{"t", c.t}, {"z", c.type}, {"S", c.set.to_vector()}, {"y", c.y}});
  }
  j["columns"] = cols;
  j["duals"] = {{"theta", sol.theta}, {"lambda", sol.lambda}};
  return j.dump(indent);
}

}  // namespace reuse_assort
