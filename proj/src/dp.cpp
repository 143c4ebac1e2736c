#include "reuse_assort/dp.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "reuse_assort/errors.hpp"

namespace reuse_assort {

namespace {

// Terms X * phi(S, i) of one product at one period, with the fee and type.
struct Term {
  double weight;  // X = y F
  double phi;
  double fee;
  int type;
};

// terms[t] for product i; the mass of columns not containing i is returned
// separately since those only ever take the discard branch.
std::vector<std::vector<Term>> product_terms(const Instance& inst, const LpSolution& lp, int i,
                                             std::vector<double>& idle_mass) {
  const int T = inst.horizon();
  std::vector<std::vector<Term>> terms(T + 2);
  idle_mass.assign(T + 2, 0.0);
  for (int t = 1; t <= T; ++t) {
    for (int z = 0; z < inst.num_types(); ++z) {
      const double f = inst.arrival_prob(t, z);
      if (f <= 0.0) continue;
      const auto& ty = inst.type(z);
      for (const auto& col : lp.columns_for(t, z)) {
        const double x = col.y * f;
        const double phi = col.set.contains(i) ? ty.choice.prob(col.set, i) : 0.0;
        if (phi > 0.0) {
          terms[t].push_back({x, phi, ty.fees[i], z});
        } else {
          idle_mass[t] += x;
        }
      }
    }
  }
  return terms;
}

}  // namespace

std::pair<double, double> replenished_branches(double stay, double returned, double phi,
                                               double fee, int units) {
  const double c = units;
  const double rented = (fee + returned) / c + (c - 1.0) / c * stay;
  return {stay, (1.0 - phi) * stay + phi * rented};
}

std::pair<double, double> inventory_branches(double keep, double sold, double phi, double fee) {
  return {keep, phi * (fee + sold) + (1.0 - phi) * keep};
}

ReplenishedDp optimistic_dp(const Instance& inst, const LpSolution& lp) {
  const int n = inst.num_products();
  const int T = inst.horizon();
  const int Z = inst.num_types();
  ReplenishedDp out;
  out.V.assign(n, std::vector<double>(T + 2, 0.0));
  out.P.assign(n, std::vector<std::vector<double>>(T + 2, std::vector<double>(Z, 0.0)));
  std::vector<double> idle;
  std::vector<double> returned(Z);
  for (int i = 0; i < n; ++i) {
    const auto terms = product_terms(inst, lp, i, idle);
    auto& V = out.V[i];
    for (int t = T; t >= 1; --t) {
      for (int z = 0; z < Z; ++z) {
        double acc = 0.0;
        for (const auto& e : inst.type(z).durations[i].finite_entries()) {
          if (t + e.periods > T) break;  // V is zero from T + 1 on
          acc += e.prob * V[t + e.periods];
        }
        returned[z] = acc;
        out.P[i][t][z] = V[t + 1] - acc;
      }
      double v = idle[t] * V[t + 1];
      for (const auto& term : terms[t]) {
        const auto [discard, offer] =
            replenished_branches(V[t + 1], returned[term.type], term.phi, term.fee, inst.inventory(i));
        v += term.weight * std::max(discard, offer);
      }
      V[t] = v;
    }
  }
  return out;
}

InventoryDp inventory_dp_product(const Instance& inst, const LpSolution& lp, int i) {
  if (!inst.product_non_reusable(i)) {
    throw PolicyError("inventory DP requires a product that never returns (product " +
                      std::to_string(i) + " is reusable)");
  }
  const int T = inst.horizon();
  const int c = inst.inventory(i);
  InventoryDp out;
  out.E.assign(T + 2, std::vector<double>(c + 1, 0.0));
  out.Q.assign(T + 2, std::vector<double>(c + 1, 0.0));
  std::vector<double> idle;
  const auto terms = product_terms(inst, lp, i, idle);
  for (int t = T; t >= 1; --t) {
    const auto& next = out.E[t + 1];
    for (int I = 1; I <= c; ++I) {
      double v = idle[t] * next[I];
      for (const auto& term : terms[t]) {
        const auto [discard, offer] = inventory_branches(next[I], next[I - 1], term.phi, term.fee);
        v += term.weight * std::max(discard, offer);
      }
      out.E[t][I] = v;
      out.Q[t][I] = next[I] - next[I - 1];
    }
  }
  return out;
}

std::vector<InventoryDp> inventory_dp(const Instance& inst, const LpSolution& lp) {
  if (!inst.fully_non_reusable()) {
    throw PolicyError("inventory DP requires every product to be non-reusable");
  }
  std::vector<InventoryDp> out;
  for (int i = 0; i < inst.num_products(); ++i) out.push_back(inventory_dp_product(inst, lp, i));
  return out;
}

double epsilon_objective(double gamma, double x) {
  return 1.0 - (1.0 - gamma) * (1.0 - std::exp(-gamma * gamma * x / (2.0 - gamma)));
}

std::pair<double, double> epsilon_star(double x) {
  if (!(x >= 0.0)) throw std::invalid_argument("epsilon_star: x must be >= 0");
  if (x == 0.0) return {1.0, 0.0};
  constexpr int kGrid = 1000;
  int best = 0;
  double best_v = epsilon_objective(0.0, x);
  for (int k = 1; k <= kGrid; ++k) {
    const double v = epsilon_objective(static_cast<double>(k) / kGrid, x);
    if (v < best_v) {
      best_v = v;
      best = k;
    }
  }
  double lo = std::max(0, best - 1) / static_cast<double>(kGrid);
  double hi = std::min(kGrid, best + 1) / static_cast<double>(kGrid);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - inv_phi * (hi - lo);
  double b = lo + inv_phi * (hi - lo);
  double fa = epsilon_objective(a, x);
  double fb = epsilon_objective(b, x);
  while (hi - lo > 1e-9) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - inv_phi * (hi - lo);
      fa = epsilon_objective(a, x);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + inv_phi * (hi - lo);
      fb = epsilon_objective(b, x);
    }
  }
  double gamma = 0.5 * (lo + hi);
  double value = epsilon_objective(gamma, x);
  // The grid point can win when the refinement interval is flat.
  const double grid_gamma = static_cast<double>(best) / kGrid;
  if (best_v < value) {
    value = best_v;
    gamma = grid_gamma;
  }
  return {value, gamma};
}

std::vector<double> hybrid_ratio(const Instance& inst, const LpSolution& lp,
                                 const std::vector<std::vector<double>>& V) {
  // Contributions are recomputed from the columns so hand-built assignments
  // work too.
  const int n = inst.num_products();
  std::vector<double> contrib(n, 0.0);
  std::vector<double> phi(n);
  for (const auto& c : lp.columns()) {
    const auto& ty = inst.type(c.type);
    const double x = c.y * inst.arrival_prob(c.t, c.type);
    if (x <= 0.0) continue;
    ty.choice.probs(c.set, phi);
    c.set.for_each([&](int i) { contrib[i] += x * phi[i] * ty.fees[i]; });
  }
  std::vector<double> R(n, 1.0);
  for (int i = 0; i < n; ++i) {
    if (contrib[i] > 0.0) R[i] = inst.inventory(i) * V[i][1] / contrib[i];
  }
  return R;
}

ValueTables build_value_tables(const Instance& inst, const LpSolution& lp) {
  ValueTables vt;
  vt.horizon = inst.horizon();
  auto rep = optimistic_dp(inst, lp);
  vt.V = std::move(rep.V);
  vt.P = std::move(rep.P);
  vt.E.resize(inst.num_products());
  vt.Q.resize(inst.num_products());
  for (int i = 0; i < inst.num_products(); ++i) {
    if (!inst.product_non_reusable(i)) continue;
    auto inv = inventory_dp_product(inst, lp, i);
    vt.E[i] = std::move(inv.E);
    vt.Q[i] = std::move(inv.Q);
  }
  vt.R = hybrid_ratio(inst, lp, vt.V);
  return vt;
}

std::string value_tables_to_json(const ValueTables& vt, int indent) {
  nlohmann::json j;
  j["horizon"] = vt.horizon;
  j["V"] = vt.V;
  j["P"] = vt.P;
  j["E"] = vt.E;
  j["Q"] = vt.Q;
  j["R"] = vt.R;
  return j.dump(indent);
}

}  // namespace reuse_assort
