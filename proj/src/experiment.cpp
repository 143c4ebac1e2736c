#include "reuse_assort/experiment.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "reuse_assort/dp.hpp"
#include "reuse_assort/errors.hpp"
#include "reuse_assort/instance_io.hpp"
#include "reuse_assort/lp.hpp"

namespace reuse_assort {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

template <class T>
T field(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field \"") + key + "\": " + e.what());
  }
}

void apply_policy_params(const json& p, PolicyConfig& cfg) {
  if (!p.is_object()) throw ConfigError("policy \"params\" must be an object");
  for (const auto& [key, value] : p.items()) {
    try {
      if (key == "gamma") {
        cfg.gamma = value.get<double>();
      } else if (key == "switch_period") {
        cfg.switch_period = value.get<int>();
      } else if (key == "mc_iters") {
        cfg.mc_iters = value.get<int>();
      } else if (key == "common_random_numbers") {
        cfg.common_random_numbers = value.get<bool>();
      } else {
        throw ConfigError("unknown policy parameter \"" + key + "\"");
      }
    } catch (const json::exception& e) {
      throw ConfigError("policy parameter \"" + key + "\": " + e.what());
    }
  }
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("parse error: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("top level must be an object");
  static const char* kKnown[] = {"scenario", "kappas",     "n_runs",  "policies", "seeds",
                                 "hybrid",   "gamma",      "output_dir", "horizon", "inventory",
                                 "threads"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(std::begin(kKnown), std::end(kKnown), key) == std::end(kKnown)) {
      throw ConfigError("unknown field \"" + key + "\"");
    }
  }
  ExperimentConfig cfg;
  if (j.contains("scenario")) {
    const auto& s = j.at("scenario");
    cfg.scenarios.clear();
    try {
      if (s.is_array()) {
        for (const auto& e : s) cfg.scenarios.push_back(parse_scenario(e.get<std::string>()));
      } else {
        cfg.scenarios.push_back(parse_scenario(s.get<std::string>()));
      }
    } catch (const json::exception& e) {
      throw ConfigError(std::string("field \"scenario\": ") + e.what());
    } catch (const ModelError& e) {
      throw ConfigError(std::string("field \"scenario\": ") + e.what());
    }
  }
  cfg.kappas = field(j, "kappas", cfg.kappas);
  for (double k : cfg.kappas) {
    if (!(k >= 0.0)) throw ConfigError("field \"kappas\": values must be >= 0");
  }
  cfg.n_runs = field(j, "n_runs", cfg.n_runs);
  if (cfg.n_runs < 1) throw ConfigError("field \"n_runs\": must be >= 1");
  cfg.output_dir = field(j, "output_dir", cfg.output_dir);
  cfg.threads = field(j, "threads", cfg.threads);
  if (j.contains("horizon")) cfg.horizon = field(j, "horizon", 0);
  if (j.contains("inventory")) cfg.inventory = field(j, "inventory", 0);
  if (cfg.horizon && *cfg.horizon < 1) throw ConfigError("field \"horizon\": must be >= 1");
  if (cfg.inventory && *cfg.inventory < 1) throw ConfigError("field \"inventory\": must be >= 1");
  if (j.contains("seeds")) {
    const auto& s = j.at("seeds");
    cfg.instance_seed = field<std::uint64_t>(s, "instance", cfg.instance_seed);
    cfg.mc_seed = field<std::uint64_t>(s, "mc", cfg.mc_seed);
  }

  PolicyConfig base;
  if (j.contains("gamma")) base.gamma = field(j, "gamma", 0.0);
  if (j.contains("hybrid")) apply_policy_params(j.at("hybrid"), base);
  if (!j.contains("policies") || !j.at("policies").is_array() || j.at("policies").empty()) {
    throw ConfigError("field \"policies\": a non-empty list is required");
  }
  for (const auto& p : j.at("policies")) {
    PolicySpec spec;
    spec.config = base;
    try {
      spec.kind = parse_policy_kind(p.at("kind").get<std::string>());
    } catch (const json::exception& e) {
      throw ConfigError(std::string("policy \"kind\": ") + e.what());
    } catch (const PolicyError& e) {
      throw ConfigError(e.what());
    }
    if (p.contains("params")) apply_policy_params(p.at("params"), spec.config);
    cfg.policies.push_back(spec);
  }
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str());
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ExperimentResult out;
  std::ostringstream runs;
  std::ostringstream summary;
  runs << "scenario,kappa,policy,run_id,revenue\n";
  summary << "scenario,kappa,policy,mean,se,median,q1,q3,min,max\n";
  for (Scenario scenario : cfg.scenarios) {
    for (double kappa : cfg.kappas) {
      Ec8Options opts;
      if (cfg.horizon) opts.horizon = *cfg.horizon;
      opts.inventory = cfg.inventory;
      const std::uint64_t seed = split_seed(
          cfg.instance_seed, {static_cast<std::uint64_t>(scenario), std::bit_cast<std::uint64_t>(kappa)});
      PreparedInputs in;
      in.instance = std::make_shared<const Instance>(gen_ec8(kappa, scenario, seed, opts));
      in.lp = std::make_shared<const LpSolution>(solve_expected_lp(*in.instance));
      in.tables = std::make_shared<const ValueTables>(build_value_tables(*in.instance, *in.lp));

      CellResult cell{scenario, kappa, in.lp->objective, {}};
      const std::string prefix = to_string(scenario) + "," + fmt(kappa) + ",";
      const std::string lp = fmt(cell.lp_objective);
      summary << prefix << "Expected-LP," << lp << ",0," << lp << "," << lp << "," << lp << ","
              << lp << "," << lp << "\n";
      for (const auto& spec : cfg.policies) {
        // Sim+OPTDis only exists for stock that never returns.
        if (spec.kind == PolicyKind::kSimOptDis && !in.instance->fully_non_reusable()) continue;
        auto policy = prepare(spec.kind, in, spec.config);
        MCStats st = monte_carlo(*in.instance, *policy, cfg.n_runs, cfg.mc_seed, cfg.threads, true);
        for (std::size_t r = 0; r < st.revenues.size(); ++r) {
          runs << prefix << st.policy << "," << r << "," << fmt(st.revenues[r]) << "\n";
        }
        summary << prefix << st.policy << "," << fmt(st.mean) << "," << fmt(st.se) << ","
                << fmt(st.median) << "," << fmt(st.q1) << "," << fmt(st.q3) << "," << fmt(st.min)
                << "," << fmt(st.max) << "\n";
        if (st.mean > cell.lp_objective + 3.0 * st.se + 1e-9) {
          out.failures.push_back(prefix + st.policy + ": mean " + fmt(st.mean) +
                                 " exceeds Expected-LP " + lp + " + 3 SE");
        }
        if (st.infeasible_offers > 0 || st.inconsistent_states > 0) {
          out.failures.push_back(prefix + st.policy + ": inventory feasibility violated");
        }
        cell.stats.push_back(std::move(st));
      }
      out.cells.push_back(std::move(cell));
    }
  }
  out.per_run_csv = runs.str();
  out.summary_csv = summary.str();
  if (!cfg.output_dir.empty()) {
    std::filesystem::create_directories(cfg.output_dir);
    const auto dir = std::filesystem::path(cfg.output_dir);
    std::ofstream(dir / "runs.csv") << out.per_run_csv;
    std::ofstream(dir / "summary.csv") << out.summary_csv;
  }
  return out;
}

std::string emit_ratio_curve(double lo, double hi, double step) {
  if (!(step > 0.0)) throw ConfigError("step must be > 0");
  if (!(lo >= 0.0) || hi < lo) throw ConfigError("need 0 <= min <= max");
  std::ostringstream os;
  os << "c,one_minus_eps,best_of_both\n";
  const long count = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
  for (long k = 0; k < count; ++k) {
    const double c = lo + k * step;
    const double ratio = 1.0 - epsilon_star(c).first;
    os << fmt(c) << "," << fmt(ratio) << "," << fmt(std::max(0.5, ratio)) << "\n";
  }
  return os.str();
}

bool Report::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::string Report::to_string() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (!c.detail.empty()) os << ": " << c.detail;
    os << "\n";
  }
  return os.str();
}

Report validate_instance_file(const std::string& path) {
  Report r;
  try {
    const Instance inst = load_instance(path, false);
    r.checks.push_back({"parse", true, ""});
    for (auto& c : inst.check()) r.checks.push_back(std::move(c));
  } catch (const Error& e) {
    r.checks.push_back({"parse", false, e.what()});
  }
  return r;
}

Report run_canonical_suite() {
  Report r;
  auto expect = [&](const std::string& name, double got, double want, double tol) {
    const bool ok = std::abs(got - want) <= tol;
    r.checks.push_back({name, ok, "got " + fmt(got) + ", expected " + fmt(want)});
  };
  try {
    const Instance f9 = gen_footnote9(0.5);
    expect("two-customer gap: column generation", solve_expected_lp(f9).objective, 1.5, 1e-6);
    expect("two-customer gap: full enumeration", full_enumeration_lp(f9).objective, 1.5, 1e-6);
    expect("two-customer gap eps=1", solve_expected_lp(gen_footnote9(1.0)).objective, 1.0, 1e-6);
    expect("half-return chain T=20", solve_expected_lp(gen_ec21(20)).objective,
           2.0 * (1.0 - std::ldexp(1.0, -20)), 1e-6);
    expect("half-return chain T=1", solve_expected_lp(gen_ec21(1)).objective, 1.0, 1e-6);

    std::vector<ConsumerType> types = {
        {"free", ChoiceModel::mnl(1.0, {1.0, 1.0}), {0.0, 0.0}, {DurationDist::fixed(2), DurationDist()}}};
    const Instance zero({2, 1}, 4, std::move(types),
                        std::vector<std::vector<double>>(4, std::vector<double>{1.0}),
                        FeasibleFamily::all_subsets());
    expect("zero fees", solve_expected_lp(zero).objective, 0.0, 1e-12);

    r.checks.push_back({"epsilon*(0) = 1", epsilon_star(0.0).first == 1.0, ""});
    const double large = epsilon_star(1e6).first;
    r.checks.push_back({"epsilon*(1e6) < 0.01", large < 0.01, "got " + fmt(large)});
  } catch (const Error& e) {
    r.checks.push_back({"canonical suite", false, e.what()});
  }
  return r;
}

}  // namespace reuse_assort
