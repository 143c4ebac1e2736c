// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all
// pass. Pass criterion numbers as arguments to run a subset.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "reuse_assort/bench.hpp"
#include "reuse_assort/dp.hpp"
#include "reuse_assort/experiment.hpp"
#include "reuse_assort/lp.hpp"
#include "reuse_assort/sampling.hpp"
#include "reuse_assort/sim.hpp"

using namespace reuse_assort;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
  char buf[200];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

PreparedInputs prepared(Instance inst) {
  PreparedInputs in;
  in.instance = std::make_shared<const Instance>(std::move(inst));
  in.lp = std::make_shared<const LpSolution>(solve_expected_lp(*in.instance));
  in.tables = std::make_shared<const ValueTables>(build_value_tables(*in.instance, *in.lp));
  return in;
}

const PolicyKind kAllKinds[] = {PolicyKind::kSimRandom, PolicyKind::kSimInfusion,
                                PolicyKind::kSimOptDis, PolicyKind::kHybridI,
                                PolicyKind::kHybridII,  PolicyKind::kIB,
                                PolicyKind::kGR};

// ---------------------------------------------------------------------------
// Shared desk-scale instances for criteria 5 to 8.

constexpr int kDeskHorizon = 60;
constexpr int kDeskInventory = 8;
constexpr int kDeskRuns = 2000;

std::vector<PreparedInputs> desk_instances(Scenario sc) {
  std::vector<PreparedInputs> out;
  Ec8Options opts;
  opts.horizon = kDeskHorizon;
  opts.inventory = kDeskInventory;
  for (double kappa : {0.0, 3.0}) {
    for (std::uint64_t rep = 0; rep < 5; ++rep) {
      const std::uint64_t seed =
          split_seed(1000, {static_cast<std::uint64_t>(sc), std::bit_cast<std::uint64_t>(kappa), rep});
      out.push_back(prepared(gen_ec8(kappa, sc, seed, opts)));
    }
  }
  return out;
}

struct DeskState {
  std::vector<PreparedInputs> rental;
  std::vector<PreparedInputs> no_rental;
  std::vector<MCStats> infusion;  // criterion 5, per rental instance
  long episodes = 0;
  long infeasible = 0;
  long inconsistent = 0;
  bool ran5 = false;
  bool ran6 = false;
};

DeskState& desk() {
  static DeskState d;
  return d;
}

void count_episodes(const MCStats& st) {
  desk().episodes += static_cast<long>(st.revenues.size());
  desk().infeasible += st.infeasible_offers;
  desk().inconsistent += st.inconsistent_states;
}

// ---------------------------------------------------------------------------

Outcome closed_form_lp() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  const double f9 = solve_expected_lp(gen_footnote9(0.5)).objective;
  const double t_f9 = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  const double ec = solve_expected_lp(gen_ec21(20)).objective;
  const double t_ec = seconds_since(t0);
  const double want = 2.0 * (1.0 - std::ldexp(1.0, -20));
  o.require(std::abs(f9 - 1.5) <= 1e-6, fmt("two-customer LP %.9f != 1.5", f9));
  o.require(std::abs(ec - want) <= 1e-6, fmt("half-return LP %.12f != %.12f", ec, want));
  o.require(t_f9 < 1.0 && t_ec < 1.0, fmt("solve times %.3f s, %.3f s", t_f9, t_ec));
  o.detail = o.passed ? fmt("LP %.9f and %.12f", f9, ec) : o.detail;
  return o;
}

Outcome online_gap() {
  Outcome o;
  const auto in = prepared(gen_footnote9(0.5));
  o.require(std::abs(in.lp->objective - 1.5) <= 1e-6, "LP != 1.5");
  double worst = 0.0;
  for (PolicyKind k : kAllKinds) {
    const auto st = monte_carlo(*in.instance, *prepare(k, in), 100000, 91);
    o.require(st.mean <= 1.0 + 3.0 * st.se,
              policy_name(k) + fmt(" mean %.5f > 1 + 3 SE (%.5f)", st.mean, st.se));
    worst = std::max(worst, st.mean);
  }
  std::vector<double> rev;
  rev.reserve(10000);
  for (int r = 0; r < 10000; ++r) rev.push_back(clairvoyant_offline_ec21(20, episode_seed(92, r)));
  const auto off = summarize(std::move(rev));
  const double lp = solve_expected_lp(gen_ec21(20)).objective;
  o.require(off.mean >= 10.0 - 3.0 * off.se, fmt("offline mean %.4f < 10 - 3 SE", off.mean));
  o.require(lp < 2.0, fmt("half-return LP %.9f not < 2", lp));
  o.require(off.mean / lp > 4.0, fmt("offline/LP ratio %.3f <= 4", off.mean / lp));
  if (o.passed) {
    o.detail = fmt("best online mean %.5f; offline %.4f vs LP %.6f", worst, off.mean, lp);
  }
  return o;
}

Outcome sampler_exactness() {
  Outcome o;
  Stream gen(3003);
  double worst_exact = 0.0, worst_z = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 1 + static_cast<int>(gen.uniform() * 6);
    std::vector<double> w(n);
    for (auto& x : w) x = gen.uniform(0.1, 2.0);
    const auto model = ChoiceModel::mnl(gen.uniform(0.05, 2.0), w);
    ProductSet s;
    for (int i = 0; i < n; ++i) {
      if (gen.bernoulli(0.8)) s.insert(i);
    }
    if (s.empty()) s.insert(0);
    std::vector<double> phi(n), p(n, 0.0);
    model.probs(s, phi);
    s.for_each([&](int i) { p[i] = gen.uniform() * phi[i]; });

    std::vector<double> exact(n, 0.0);
    for (const auto& [sub, q] : enumerate_sample_distribution(model, s, p)) {
      sub.for_each([&](int i) { exact[i] += q * choice_prob(model, sub, i); });
    }
    std::vector<double> sum(n, 0.0), sq(n, 0.0);
    Stream draw(split_seed(3004, {static_cast<std::uint64_t>(rep)}));
    const int draws = 100000;
    for (int k = 0; k < draws; ++k) {
      const ProductSet sub = sub_assortment_sample(model, s, p, draw);
      sub.for_each([&](int i) {
        const double v = choice_prob(model, sub, i);
        sum[i] += v;
        sq[i] += v * v;
      });
    }
    s.for_each([&](int i) {
      worst_exact = std::max(worst_exact, std::abs(exact[i] - p[i]));
      const double mean = sum[i] / draws;
      const double se = std::sqrt(std::max(0.0, sq[i] / draws - mean * mean) / draws);
      const double dev = std::abs(mean - p[i]);
      if (se > 0.0) worst_z = std::max(worst_z, dev / se);
      else if (dev > 1e-12) worst_z = 1e9;
    });
  }
  o.require(worst_exact <= 1e-12, fmt("exact marginal error %.3g", worst_exact));
  o.require(worst_z <= 4.0, fmt("Monte-Carlo deviation %.2f SE", worst_z));
  if (o.passed) o.detail = fmt("max exact error %.2g, max MC deviation %.2f SE", worst_exact, worst_z);
  return o;
}

Outcome solver_cross_check() {
  Outcome o;
  Stream gen(4004);
  double worst_gap = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    auto uni = [&](int lo, int hi) { return lo + static_cast<int>(gen.uniform() * (hi - lo + 1)); };
    const int n = uni(1, 3), T = uni(1, 10), k = uni(1, 2);
    std::vector<int> c(n);
    for (auto& x : c) x = uni(1, 3);
    std::vector<ConsumerType> types;
    for (int z = 0; z < k; ++z) {
      std::vector<double> w(n), fees(n);
      std::vector<DurationDist> d(n);
      for (int i = 0; i < n; ++i) {
        w[i] = gen.bernoulli(0.2) ? 0.0 : gen.uniform(0.1, 2.0);
        fees[i] = gen.uniform(0.0, 10.0);
        const double u = gen.uniform();
        if (u < 0.4) {
          d[i] = DurationDist::fixed(uni(1, T));
        } else if (u < 0.7) {
          d[i] = DurationDist({{uni(1, T), 0.5}, {kInfiniteDuration, 0.5}});
        }
      }
      types.push_back({"z" + std::to_string(z), ChoiceModel::mnl(gen.uniform(0.1, 2.0), w), fees, d});
    }
    std::vector<std::vector<double>> arrival(T, std::vector<double>(k));
    for (auto& row : arrival) {
      double sum = 0.0;
      for (auto& x : row) sum += (x = gen.uniform(0.05, 1.0));
      for (auto& x : row) x /= sum;
    }
    const Instance inst(c, T, std::move(types), std::move(arrival), FeasibleFamily::all_subsets());
    const auto cg = solve_expected_lp(inst);
    const auto full = full_enumeration_lp(inst);
    const double gap = std::abs(cg.objective - full.objective);
    worst_gap = std::max(worst_gap, gap);
    o.require(gap <= 1e-6, fmt("instance %.0f: objectives differ by %.3g", rep, gap));
    for (const auto* sol : {&cg, &full}) {
      const auto usage = plug_back_usage_table(inst, *sol);
      for (int i = 0; i < n; ++i) {
        for (int t = 1; t <= T; ++t) {
          o.require(usage[i][t - 1] <= c[i] + 1e-6, fmt("instance %.0f: plug-back %.6f on row %.0f",
                                                       rep, usage[i][t - 1], i * T + t));
        }
      }
    }
  }
  if (o.passed) o.detail = fmt("max objective gap %.2g over 50 instances", worst_gap);
  return o;
}

Outcome infusion_half() {
  Outcome o;
  auto& d = desk();
  if (d.rental.empty()) d.rental = desk_instances(Scenario::kRental);
  double worst = 1e9;
  for (std::size_t k = 0; k < d.rental.size(); ++k) {
    const auto& in = d.rental[k];
    const auto st = monte_carlo(*in.instance, *prepare(PolicyKind::kSimInfusion, in), kDeskRuns,
                                split_seed(5005, {k}), 0, true);
    count_episodes(st);
    const double bound = 0.5 * in.lp->objective;
    o.require(st.mean >= bound - 3.0 * st.se,
              fmt("instance %.0f: mean %.2f < 0.5 LP %.2f - 3 SE", k, st.mean, bound));
    worst = std::min(worst, st.mean / in.lp->objective);
    d.infusion.push_back(st);
  }
  d.ran5 = true;
  if (o.passed) o.detail = fmt("worst mean/LP %.4f (bound 0.5)", worst);
  return o;
}

Outcome optdis_bound() {
  Outcome o;
  auto& d = desk();
  if (d.no_rental.empty()) d.no_rental = desk_instances(Scenario::kNoRental);
  const double ratio = 1.0 - 1.0 / std::sqrt(kDeskInventory + 3.0);
  double worst = 1e9;
  for (std::size_t k = 0; k < d.no_rental.size(); ++k) {
    const auto& in = d.no_rental[k];
    const auto st = monte_carlo(*in.instance, *prepare(PolicyKind::kSimOptDis, in), kDeskRuns,
                                split_seed(6006, {k}), 0, true);
    count_episodes(st);
    const double bound = ratio * in.lp->objective;
    o.require(st.mean >= bound - 3.0 * st.se,
              fmt("instance %.0f: mean %.2f < bound %.2f - 3 SE", k, st.mean, bound));
    worst = std::min(worst, st.mean / in.lp->objective);
  }
  d.ran6 = true;
  if (o.passed) o.detail = fmt("worst mean/LP %.4f (bound %.4f)", worst, ratio);
  return o;
}

Outcome pointwise_feasibility() {
  Outcome o;
  auto& d = desk();
  if (!d.ran5) infusion_half();
  if (!d.ran6) optdis_bound();
  o.require(d.episodes >= 40000, fmt("only %.0f episodes", static_cast<double>(d.episodes)));
  o.require(d.infeasible == 0, fmt("%.0f offers of unavailable products", static_cast<double>(d.infeasible)));
  o.require(d.inconsistent == 0, fmt("%.0f inventory-state failures", static_cast<double>(d.inconsistent)));
  if (o.passed) o.detail = fmt("%.0f episodes, no violations", static_cast<double>(d.episodes));
  return o;
}

Outcome hybrid_dominance() {
  Outcome o;
  auto& d = desk();
  if (!d.ran5) infusion_half();
  double worst_ii = 1e9, worst_i = 1e9;
  for (std::size_t k = 0; k < d.rental.size(); ++k) {
    const auto& in = d.rental[k];
    const std::uint64_t seed = split_seed(5005, {k});  // same runs as criterion 5
    const auto& infusion = d.infusion[k];
    const auto random = monte_carlo(*in.instance, *prepare(PolicyKind::kSimRandom, in), kDeskRuns, seed);
    const auto h1 = monte_carlo(*in.instance, *prepare(PolicyKind::kHybridI, in), kDeskRuns, seed);
    const auto h2 = monte_carlo(*in.instance, *prepare(PolicyKind::kHybridII, in), kDeskRuns, seed);

    const MCStats& best = random.mean >= infusion.mean ? random : infusion;
    const MCStats& worst = random.mean >= infusion.mean ? infusion : random;
    const double se2 = paired_se(h2.revenues, best.revenues);
    const double se1 = paired_se(h1.revenues, worst.revenues);
    o.require(h2.mean >= best.mean - 3.0 * se2,
              fmt("instance %.0f: Hybrid(ii) %.2f < best component %.2f - 3 SE", k, h2.mean, best.mean));
    o.require(h1.mean >= worst.mean - 3.0 * se1,
              fmt("instance %.0f: Hybrid(i) %.2f < worst component %.2f - 3 SE", k, h1.mean, worst.mean));
    worst_ii = std::min(worst_ii, h2.mean - best.mean);
    worst_i = std::min(worst_i, h1.mean - worst.mean);
  }
  if (o.passed) {
    o.detail = fmt("smallest mean margins: Hybrid(ii) %+.2f over best, Hybrid(i) %+.2f over worst",
                   worst_ii, worst_i);
  }
  return o;
}

Outcome benchmark_sweep() {
  Outcome o;
  ExperimentConfig cfg = parse_experiment_config(R"({
    "scenario": ["NO_RENTAL", "RENTAL"], "kappas": [0, 1, 2, 3], "n_runs": 50,
    "seeds": {"instance": 1, "mc": 2}, "hybrid": {"switch_period": 10, "mc_iters": 20},
    "policies": [{"kind": "SimRandom", "params": {"gamma": 0.1}}, {"kind": "SimInfusion"},
                 {"kind": "SimOptDis"}, {"kind": "HybridI"},
                 {"kind": "HybridII", "params": {"gamma": 0.1}}, {"kind": "IB"}, {"kind": "GR"}],
    "output_dir": ""})");
  const auto res = run_experiment(cfg);
  for (const auto& f : res.failures) o.require(false, f);
  int order_checks = 0;
  for (const auto& cell : res.cells) {
    const std::string where = to_string(cell.scenario) + fmt(" kappa=%.0f", cell.kappa);
    auto find = [&](PolicyKind k) -> const MCStats* {
      for (const auto& st : cell.stats) {
        if (st.policy == policy_name(k)) return &st;
      }
      return nullptr;
    };
    for (const auto& st : cell.stats) {
      o.require(st.mean <= cell.lp_objective + 3.0 * st.se, where + " " + st.policy + " above LP");
    }
    const MCStats* h2 = find(PolicyKind::kHybridII);
    for (PolicyKind k : {PolicyKind::kSimRandom, PolicyKind::kSimInfusion, PolicyKind::kSimOptDis}) {
      const MCStats* c = find(k);
      if (!c || !h2) continue;
      const double se = paired_se(h2->revenues, c->revenues);
      o.require(h2->mean >= c->mean - 3.0 * se,
                where + fmt(" Sim+Hybrid(ii) %.2f below %.2f - 3 SE", h2->mean, c->mean) + " of " +
                    c->policy);
      ++order_checks;
    }
    if (cell.kappa >= 2.0) {
      const MCStats* gr = find(PolicyKind::kGR);
      for (const auto& st : cell.stats) {
        if (!is_simulation_based(parse_policy_kind(st.policy))) continue;
        o.require(st.mean > gr->mean, where + " " + st.policy + " does not beat GR");
        ++order_checks;
      }
    }
  }
  if (o.passed) o.detail = fmt("%.0f cells, %.0f order checks", res.cells.size(), order_checks);
  return o;
}

Outcome bellman_thresholds() {
  Outcome o;
  Stream gen(1010);
  int agree = 0, compared = 0;
  for (int rep = 0; rep < 10000; ++rep) {
    const int span = 1 + static_cast<int>(gen.uniform() * 10);
    std::vector<double> v(span + 2, 0.0);
    for (int k = span; k >= 0; --k) v[k] = v[k + 1] + gen.uniform(0.0, 5.0);
    double returned = 0.0, left = gen.uniform();
    for (int dd = 1; dd <= span; ++dd) {
      const double g = dd == span ? left : left * gen.uniform();
      returned += g * v[dd];
      left -= g;
    }
    const double stay = v[1];
    const double phi = gen.uniform(1e-3, 1.0);
    const int units = 1 + static_cast<int>(gen.uniform() * 40);
    const double fee = gen.uniform(0.0, 2.0 * stay + 1.0);
    const double p = stay - returned;
    if (std::abs(fee - p) < 1e-10) continue;
    const auto [discard, offer] = replenished_branches(stay, returned, phi, fee, units);
    ++compared;
    agree += (offer > discard) == (fee >= p);
  }
  int agree2 = 0, compared2 = 0;
  for (int rep = 0; rep < 10000; ++rep) {
    const double keep = gen.uniform(0.0, 100.0);
    const double sold = keep - gen.uniform(0.0, 20.0);
    const double phi = gen.uniform(1e-3, 1.0);
    const double fee = gen.uniform(0.0, 25.0);
    const double q = keep - sold;
    if (std::abs(fee - q) < 1e-10) continue;
    const auto [discard, offer] = inventory_branches(keep, sold, phi, fee);
    ++compared2;
    agree2 += (offer > discard) == (fee >= q);
  }
  o.require(agree == compared, fmt("replenished: %.0f of %.0f agree", agree, compared));
  o.require(agree2 == compared2, fmt("inventory: %.0f of %.0f agree", agree2, compared2));
  if (o.passed) o.detail = fmt("%.0f + %.0f draws agree", compared, compared2);
  return o;
}

Outcome epsilon_curve() {
  Outcome o;
  o.require(epsilon_star(0.0).first == 1.0, "epsilon*(0) != 1");
  double prev = epsilon_star(1.0).first;
  int violations = 0;
  for (int c = 2; c <= 10000; ++c) {
    const double e = epsilon_star(c).first;
    if (e > prev) ++violations;
    prev = e;
  }
  o.require(violations == 0, fmt("%.0f increases over c = 1..10^4", violations));
  const double big = epsilon_star(1e6).first;
  o.require(big < 0.01, fmt("epsilon*(1e6) = %.5f", big));
  if (o.passed) o.detail = fmt("epsilon*(1e4) = %.5f, epsilon*(1e6) = %.5f", prev, big);
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::setvbuf(stdout, nullptr, _IOLBF, 0);
  const std::vector<Criterion> criteria = {
      {1, "closed-form LP values", 2.0, closed_form_lp},
      {2, "online-vs-LP gap", 30.0, online_gap},
      {3, "sub-assortment sampler exactness", 30.0, sampler_exactness},
      {4, "column generation vs full enumeration", 120.0, solver_cross_check},
      {5, "Sim+Infusion >= LP/2 (rental, T=60, c=8)", 300.0, infusion_half},
      {6, "Sim+OPTDis >= (1 - 1/sqrt(c+3)) LP (no rental, T=60, c=8)", 300.0, optdis_bound},
      {7, "point-wise inventory feasibility", 600.0, pointwise_feasibility},
      {8, "hybrid dominance", 900.0, hybrid_dominance},
      {9, "benchmark sweep order properties", 600.0, benchmark_sweep},
      {10, "Bellman branch vs threshold equivalence", 5.0, bellman_thresholds},
      {11, "epsilon* curve", 5.0, epsilon_curve},
  };
  std::set<int> selected;
  for (int a = 1; a < argc; ++a) selected.insert(std::atoi(argv[a]));

  int failed = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = seconds_since(t0);
    if (secs > c.budget_seconds) {
      o.passed = false;
      o.detail += fmt("; took %.1f s, budget %.0f s", secs, c.budget_seconds);
    }
    std::printf("%s [%d] %s: %s (%.2f s)\n", o.passed ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs);
    failed += !o.passed;
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
