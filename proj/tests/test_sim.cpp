#include <cmath>
#include <sstream>

#include "doctest.h"
#include "generators.hpp"
#include "reuse_assort/bench.hpp"
#include "reuse_assort/dp.hpp"
#include "reuse_assort/errors.hpp"
#include "reuse_assort/lp.hpp"
#include "reuse_assort/sim.hpp"

using namespace reuse_assort;

namespace {

PreparedInputs prepared(Instance inst) {
  PreparedInputs in;
  in.instance = std::make_shared<const Instance>(std::move(inst));
  in.lp = std::make_shared<const LpSolution>(solve_expected_lp(*in.instance));
  in.tables = std::make_shared<const ValueTables>(build_value_tables(*in.instance, *in.lp));
  return in;
}

Instance two_sure_customers(DurationDist d) {
  std::vector<ConsumerType> types = {{"sure", ChoiceModel::mnl(0.0, {1.0}), {1.0}, {std::move(d)}}};
  return Instance({1}, 2, std::move(types), {{1.0}, {1.0}}, FeasibleFamily::all_subsets());
}

}  // namespace

TEST_CASE("inventory state bookkeeping") {
  InventoryState inv({2, 1});
  inv.allocate(0, 1, 2, 10);
  inv.allocate(0, 1, kInfiniteDuration, 10);
  CHECK(inv.available(0) == 0);
  CHECK(inv.pending(0) == 1);
  CHECK(inv.gone(0) == 1);
  CHECK(inv.consistent(1));
  CHECK_THROWS_AS(inv.allocate(0, 1, 1, 10), PolicyError);
  inv.release(2);
  CHECK(inv.available(0) == 0);
  inv.release(3);
  CHECK(inv.available(0) == 1);
  CHECK(inv.consistent(3));
  inv.allocate(1, 3, 9, 10);  // due after the horizon
  CHECK(inv.gone(1) == 1);
  CHECK(inv.available_set() == ProductSet::of({0}));
  CHECK_FALSE(inv.all_exhausted());
}

TEST_CASE("hand-simulated episodes") {
  const auto lost = prepared(two_sure_customers(DurationDist()));
  const auto back = prepared(two_sure_customers(DurationDist::fixed(1)));
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    CHECK(run_episode(*lost.instance, *prepare(PolicyKind::kGR, lost), seed).revenue == 1.0);
    CHECK(run_episode(*back.instance, *prepare(PolicyKind::kGR, back), seed).revenue == 2.0);
  }
  const auto st = monte_carlo(*back.instance, *prepare(PolicyKind::kGR, back), 7, 1);
  CHECK(st.se == 0.0);
  CHECK(st.mean == 2.0);
}

TEST_CASE("zero fees earn nothing") {
  std::vector<ConsumerType> types = {{"free", ChoiceModel::mnl(1.0, {1.0, 1.0}), {0.0, 0.0},
                                      {DurationDist::fixed(2), DurationDist()}}};
  const auto in = prepared(Instance({1, 2}, 6, std::move(types),
                                    std::vector<std::vector<double>>(6, {1.0}),
                                    FeasibleFamily::all_subsets()));
  for (auto k : {PolicyKind::kSimRandom, PolicyKind::kSimInfusion, PolicyKind::kHybridI,
                 PolicyKind::kHybridII, PolicyKind::kIB, PolicyKind::kGR}) {
    CHECK(monte_carlo(*in.instance, *prepare(k, in), 5, 3).mean == 0.0);
  }
}

TEST_CASE("summary statistics") {
  const auto one = summarize({4.5});
  CHECK(one.mean == 4.5);
  CHECK(one.median == 4.5);
  const auto s = summarize({4.0, 1.0, 3.0, 2.0});
  CHECK(s.mean == doctest::Approx(2.5));
  CHECK(s.median == doctest::Approx(2.5));
  CHECK(s.q1 == doctest::Approx(1.75));
  CHECK(s.q3 == doctest::Approx(3.25));
  CHECK(s.min == 1.0);
  CHECK(s.max == 4.0);
  // Sample variance 5/3, n = 4.
  CHECK(s.se == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  CHECK(s.revenues[0] == 4.0);  // run order is kept
  CHECK(paired_se({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}) == 0.0);
  CHECK_THROWS(paired_se({1.0}, {1.0, 2.0}));
}

TEST_CASE("trace records add up to the revenue") {
  const auto in = prepared(gen_ec8(1.0, Scenario::kRental, 3, {30, 3}));
  EpisodeOptions opts;
  opts.record_trace = true;
  opts.check_state = true;
  const auto res = run_episode(*in.instance, *prepare(PolicyKind::kSimInfusion, in), 99, opts);
  double fees = 0.0;
  for (const auto& r : res.trace) fees += r.fee;
  CHECK(fees == doctest::Approx(res.revenue));
  CHECK(res.trace.size() == 30u);
  CHECK(res.inconsistent_states == 0);
  CHECK(res.infeasible_offers == 0);
  const auto jsonl = trace_to_jsonl(res);
  CHECK(std::count(jsonl.begin(), jsonl.end(), '\n') == 30);
}

TEST_CASE("monte carlo output does not depend on the thread count") {
  const auto in = prepared(gen_ec8(2.0, Scenario::kNoRental, 5, {40, 5}));
  for (auto k : {PolicyKind::kSimRandom, PolicyKind::kHybridII, PolicyKind::kIB}) {
    PolicyConfig cfg;
    cfg.mc_iters = 3;
    auto p = prepare(k, in, cfg);
    const auto a = monte_carlo(*in.instance, *p, 24, 11, 1);
    const auto b = monte_carlo(*in.instance, *p, 24, 11, 4);
    const auto c = monte_carlo(*in.instance, *p, 24, 11, 3);
    CHECK(a.revenues == b.revenues);
    CHECK(a.revenues == c.revenues);
  }
}

TEST_CASE("rollout count does not touch the episode's own draws") {
  const auto in = prepared(gen_ec8(1.0, Scenario::kRental, 6, {40, 4}));
  PolicyConfig few, many;
  few.mc_iters = 2;
  many.mc_iters = 9;
  auto a = prepare(PolicyKind::kHybridII, in, few);
  auto b = prepare(PolicyKind::kHybridII, in, many);
  auto gr = prepare(PolicyKind::kGR, in);
  EpisodeOptions opts;
  opts.record_trace = true;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto ta = run_episode(*in.instance, *a, seed, opts).trace;
    const auto tb = run_episode(*in.instance, *b, seed, opts).trace;
    const auto tg = run_episode(*in.instance, *gr, seed, opts).trace;
    for (std::size_t k = 0; k < ta.size(); ++k) {
      CHECK(ta[k].type == tb[k].type);
      CHECK(ta[k].type == tg[k].type);
    }
  }
}

TEST_CASE("clairvoyant offline revenue on the half-return chain") {
  for (std::uint64_t s = 0; s < 20; ++s) CHECK(clairvoyant_offline_ec21(1, s) == 1.0);
  std::vector<double> rev;
  for (int r = 0; r < 10000; ++r) rev.push_back(clairvoyant_offline_ec21(20, episode_seed(5, r)));
  const auto st = summarize(rev);
  CHECK(st.mean >= 10.0 - 3.0 * st.se);
  CHECK(st.min >= 1.0);
  CHECK_THROWS_AS(clairvoyant_offline_ec21(0, 1), ModelError);
}

TEST_CASE("property: no policy beats the LP beyond sampling error") {
  Stream gen(71);
  for (int rep = 0; rep < 25; ++rep) {
    testgen::InstanceShape shape;
    shape.reusable = rep % 2 == 0;
    const auto in = prepared(testgen::random_instance(gen, shape));
    for (auto k : {PolicyKind::kSimRandom, PolicyKind::kSimInfusion, PolicyKind::kSimOptDis,
                   PolicyKind::kHybridI, PolicyKind::kHybridII, PolicyKind::kIB, PolicyKind::kGR}) {
      if (k == PolicyKind::kSimOptDis && !in.instance->fully_non_reusable()) continue;
      PolicyConfig cfg;
      cfg.mc_iters = 3;
      const auto st = monte_carlo(*in.instance, *prepare(k, in, cfg), 300, rep, 1, true);
      CHECK(st.mean <= in.lp->objective + 3.0 * st.se + 1e-9);
      CHECK(st.infeasible_offers == 0);
      CHECK(st.inconsistent_states == 0);
    }
  }
}
