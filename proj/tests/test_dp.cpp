#include <cmath>

#include "doctest.h"
#include "generators.hpp"
#include "reuse_assort/bench.hpp"
#include "reuse_assort/dp.hpp"
#include "reuse_assort/errors.hpp"
#include "reuse_assort/lp.hpp"

using namespace reuse_assort;

namespace {

Instance one_step(double alpha0, double fee, int units, DurationDist d = {}) {
  std::vector<ConsumerType> types = {{"a", ChoiceModel::mnl(alpha0, {1.0}), {fee}, {std::move(d)}}};
  return Instance({units}, 1, std::move(types), {{1.0}}, FeasibleFamily::all_subsets());
}

LpSolution offer_always(int horizon) {
  std::vector<LpColumn> cols;
  for (int t = 1; t <= horizon; ++t) cols.push_back({t, 0, ProductSet::of({0}), 1.0});
  return LpSolution(horizon, 1, cols);
}

void check_table_invariants(const Instance& inst, const ValueTables& tb) {
  const int T = inst.horizon();
  for (int i = 0; i < inst.num_products(); ++i) {
    CHECK(tb.V[i][T + 1] == 0.0);
    for (int t = 1; t <= T; ++t) {
      CHECK(tb.V[i][t] >= tb.V[i][t + 1] - 1e-12);
      CHECK(tb.V[i][t + 1] >= 0.0);
    }
    CHECK(tb.R[i] >= 0.5 - 1e-9);
    CHECK(tb.R[i] <= 1.0 + 1e-9);
    if (!tb.has_inventory_dp(i)) continue;
    for (int I = 0; I <= inst.inventory(i); ++I) CHECK(tb.E[i][T + 1][I] == 0.0);
    for (int t = 1; t <= T; ++t) {
      CHECK(tb.E[i][t][0] == 0.0);
      for (int I = 1; I <= inst.inventory(i); ++I) {
        CHECK(tb.E[i][t][I] >= tb.E[i][t][I - 1] - 1e-12);
        CHECK(tb.E[i][t][I] >= tb.E[i][t + 1][I] - 1e-12);
        CHECK(tb.Q[i][t][I] == doctest::Approx(tb.E[i][t + 1][I] - tb.E[i][t + 1][I - 1]));
      }
    }
  }
}

}  // namespace

TEST_CASE("one-step replenished value") {
  const Instance inst = one_step(1.0, 10.0, 2);
  const auto dp = optimistic_dp(inst, offer_always(1));
  CHECK(dp.V[0][1] == doctest::Approx(2.5));
  CHECK(dp.V[0][2] == 0.0);
}

TEST_CASE("one-step inventory value") {
  const Instance inst = one_step(3.0, 8.0, 1);  // phi = 1/4
  const auto dp = inventory_dp_product(inst, offer_always(1), 0);
  CHECK(dp.E[1][1] == doctest::Approx(0.25 * 8.0));
  CHECK(dp.E[1][0] == 0.0);
}

TEST_CASE("zero fees give zero tables") {
  const Instance inst = one_step(1.0, 0.0, 2);
  const auto tb = build_value_tables(inst, offer_always(1));
  CHECK(tb.V[0][1] == 0.0);
  CHECK(tb.P[0][1][0] == 0.0);
  CHECK(tb.E[0][1][2] == 0.0);
  CHECK(tb.R[0] == 1.0);
}

TEST_CASE("two-customer gap instance tables") {
  const Instance inst = gen_footnote9(0.5);
  const LpSolution lp = solve_expected_lp(inst);
  const auto tb = build_value_tables(inst, lp);
  // The rare type arrives w.p. 1/2 with fee 2 and is always offered.
  CHECK(tb.V[0][2] == doctest::Approx(1.0));
  // Fee 1 meets the threshold at t = 1 exactly (ties accept).
  CHECK(tb.P[0][1][0] == doctest::Approx(1.0));
  check_table_invariants(inst, tb);
}

TEST_CASE("inventory DP refuses reusable products") {
  const Instance inst = gen_ec21(5);
  const LpSolution lp = solve_expected_lp(inst);
  CHECK_THROWS_AS(inventory_dp_product(inst, lp, 0), PolicyError);
  CHECK_THROWS_AS(inventory_dp(inst, lp), PolicyError);
  CHECK_FALSE(build_value_tables(inst, lp).has_inventory_dp(0));
}

TEST_CASE("property: value-table invariants on random instances") {
  Stream rng(51);
  for (int rep = 0; rep < 60; ++rep) {
    testgen::InstanceShape shape;
    shape.max_products = 3;
    shape.max_horizon = 12;
    shape.reusable = rep % 2 == 0;
    const Instance inst = testgen::random_instance(rng, shape);
    check_table_invariants(inst, build_value_tables(inst, solve_expected_lp(inst)));
  }
}

TEST_CASE("property: Bellman branches agree with the thresholds") {
  Stream rng(52);
  int checked = 0;
  for (int rep = 0; rep < 10000; ++rep) {
    // Non-increasing continuation values and a random return pmf.
    const int span = testgen::uniform_int(rng, 1, 8);
    std::vector<double> v(span + 2);
    v[span + 1] = 0.0;
    for (int k = span; k >= 0; --k) v[k] = v[k + 1] + rng.uniform(0.0, 3.0);
    double returned = 0.0, left = rng.uniform();
    for (int d = 1; d <= span; ++d) {
      const double g = d == span ? left : left * rng.uniform();
      returned += g * v[d];
      left -= g;
    }
    const double stay = v[1];
    const double phi = rng.uniform(0.01, 1.0);
    const int units = testgen::uniform_int(rng, 1, 30);
    const double threshold = stay - returned;
    const double fee = rng.bernoulli(0.1) ? threshold : rng.uniform(0.0, 2.0 * stay + 1.0);
    if (std::abs(fee - threshold) < 1e-10) continue;
    const auto [discard, offer] = replenished_branches(stay, returned, phi, fee, units);
    CHECK((offer > discard) == (fee >= threshold));

    const double keep = rng.uniform(0.0, 50.0);
    const double sold = keep - rng.uniform(0.0, 10.0);
    const double q = keep - sold;
    const double fee2 = rng.uniform(0.0, 12.0);
    if (std::abs(fee2 - q) < 1e-10) continue;
    const auto [d2, o2] = inventory_branches(keep, sold, phi, fee2);
    CHECK((o2 > d2) == (fee2 >= q));
    ++checked;
  }
  CHECK(checked > 8500);
}

TEST_CASE("epsilon star endpoints and ordering") {
  const auto [e0, g0] = epsilon_star(0.0);
  CHECK(e0 == 1.0);
  const double x = 1e6;
  const double g = std::sqrt(2.0 * std::log(x) / x);
  CHECK(epsilon_objective(g, x) < 0.01);
  CHECK(epsilon_star(x).first <= epsilon_objective(g, x) + 1e-12);
  CHECK(epsilon_star(x).first < 0.01);
  CHECK(epsilon_star(1.0).first >= epsilon_star(30.0).first);
  CHECK(epsilon_star(30.0).first >= epsilon_star(1e4).first);
}

TEST_CASE("property: epsilon star minimizes its objective") {
  Stream rng(53);
  for (double x : {0.5, 1.0, 3.0, 20.0, 30.0, 200.0, 1e4}) {
    const auto [eps, gamma] = epsilon_star(x);
    CHECK(epsilon_objective(gamma, x) == doctest::Approx(eps).epsilon(1e-12));
    for (int k = 0; k < 10000; ++k) CHECK(eps <= epsilon_objective(rng.uniform(), x) + 1e-9);
  }
}

TEST_CASE("hybrid ratio convention for unused products") {
  const Instance inst = one_step(1.0, 0.0, 1);
  const auto tb = build_value_tables(inst, LpSolution(1, 1, {}));
  CHECK(tb.R[0] == 1.0);
}

TEST_CASE("value table JSON export") {
  const Instance inst = gen_footnote9(0.5);
  const auto text = value_tables_to_json(build_value_tables(inst, solve_expected_lp(inst)));
  CHECK(text.find("\"V\"") != std::string::npos);
  CHECK(text.find("\"R\"") != std::string::npos);
}
