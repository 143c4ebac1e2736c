#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "reuse_assort/bench.hpp"
#include "reuse_assort/experiment.hpp"
#include "reuse_assort/instance_io.hpp"

using namespace reuse_assort;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("reuse_assort_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> split(const std::string& l) {
  std::vector<std::string> out;
  std::stringstream ss(l);
  for (std::string f; std::getline(ss, f, ',');) out.push_back(f);
  return out;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = parse_experiment_config(R"({
    "scenario": ["RENTAL", "NO_RENTAL"], "kappas": [0, 2], "n_runs": 3,
    "policies": [{"kind": "SimRandom", "params": {"gamma": 0.1}}, {"kind": "HybridII"}],
    "seeds": {"instance": 5, "mc": 6}, "hybrid": {"switch_period": 5, "mc_iters": 4},
    "output_dir": ""})");
  CHECK(cfg.scenarios.size() == 2u);
  CHECK(cfg.kappas == std::vector<double>{0.0, 2.0});
  CHECK(cfg.policies[0].config.gamma == 0.1);
  CHECK(cfg.policies[1].config.switch_period == 5);
  CHECK(cfg.policies[1].config.mc_iters == 4);
  CHECK(cfg.instance_seed == 5u);
  CHECK_THROWS_AS(parse_experiment_config("{\"policies\": []}"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_config("{\"policies\": [{\"kind\": \"GR\"}], \"bogus\": 1}"),
                  ConfigError);
  CHECK_THROWS_AS(parse_experiment_config("{\"policies\": [{\"kind\": \"Oracle\"}]}"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_config("{\"policies\": [{\"kind\": \"GR\"}], \"n_runs\": 0}"),
                  ConfigError);
  CHECK_THROWS_AS(parse_experiment_config("not json"), ConfigError);
}

TEST_CASE("repeated runs write identical files") {
  const auto dir = scratch_dir("det");
  ExperimentConfig cfg = parse_experiment_config(
      R"({"scenario": "RENTAL", "kappas": [1], "n_runs": 2, "horizon": 30, "inventory": 3,
          "policies": [{"kind": "GR"}]})");
  cfg.output_dir = (dir / "a").string();
  run_experiment(cfg);
  cfg.output_dir = (dir / "b").string();
  run_experiment(cfg);
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  for (const char* f : {"runs.csv", "summary.csv"}) {
    const auto a = slurp(dir / "a" / f);
    CHECK(!a.empty());
    CHECK(a == slurp(dir / "b" / f));
  }
}

TEST_CASE("kappa sweep: LP row leads every block and dominates") {
  ExperimentConfig cfg = parse_experiment_config(
      R"({"scenario": "NO_RENTAL", "kappas": [0, 1, 2, 3], "n_runs": 20, "horizon": 40,
          "inventory": 4, "output_dir": "",
          "policies": [{"kind": "SimInfusion"}, {"kind": "SimOptDis"}, {"kind": "IB"},
                       {"kind": "GR"}]})");
  const auto res = run_experiment(cfg);
  CHECK(res.ok());
  const auto summary = lines(res.summary_csv);
  REQUIRE(summary.size() == 1u + 4u * 5u);
  CHECK(summary[0] == "scenario,kappa,policy,mean,se,median,q1,q3,min,max");
  CHECK(lines(res.per_run_csv)[0] == "scenario,kappa,policy,run_id,revenue");
  CHECK(lines(res.per_run_csv).size() == 1u + 4u * 4u * 20u);
  for (int block = 0; block < 4; ++block) {
    const auto lp = split(summary[1 + 5 * block]);
    CHECK(lp[2] == "Expected-LP");
    for (int k = 1; k < 5; ++k) {
      const auto row = split(summary[1 + 5 * block + k]);
      CHECK(row.size() == 10u);
      CHECK(std::stod(row[3]) <= std::stod(lp[3]) + 3.0 * std::stod(row[4]) + 1e-9);
    }
  }
}

TEST_CASE("ratio curve rows") {
  const auto rows = lines(emit_ratio_curve(0.0, 4.0, 1.0));
  REQUIRE(rows.size() == 6u);
  CHECK(rows[1] == "0,0,0.5");
  double prev = -1.0;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const double v = std::stod(split(rows[k])[1]);
    CHECK(v >= prev);
    prev = v;
  }
  const auto big = split(lines(emit_ratio_curve(1e6, 1e6, 1.0))[1]);
  CHECK(std::stod(big[1]) > 0.99);
  CHECK_THROWS_AS(emit_ratio_curve(0.0, 1.0, 0.0), ConfigError);
}

TEST_CASE("instance validation reports") {
  const auto dir = scratch_dir("validate");
  const auto good = dir / "good.json";
  save_instance(gen_ec8(1.0, Scenario::kRental, 3), good.string());
  CHECK(validate_instance_file(good.string()).ok());

  auto j = nlohmann::json::parse(instance_to_json(gen_ec21(3)));
  j["arrival"][1][0] = 0.9;
  std::ofstream(dir / "arrival.json") << j.dump();
  const auto bad = validate_instance_file((dir / "arrival.json").string());
  CHECK_FALSE(bad.ok());
  CHECK(bad.to_string().find("FAIL") != std::string::npos);

  auto t = nlohmann::json::parse(instance_to_json(gen_ec21(2)));
  auto& ty = t["types"][0];
  ty.erase("alpha0");
  ty.erase("alpha");
  ty["fees"] = {1.0, 1.0};
  ty["durations"] = {{{"inf", 1.0}}, {{"inf", 1.0}}};
  ty["table"] = {{{"S", nlohmann::json::array()}, {"probs", {0.0, 0.0}}},
                 {{"S", {0}}, {"probs", {0.3, 0.0}}},
                 {{"S", {1}}, {"probs", {0.0, 0.3}}},
                 {{"S", {0, 1}}, {"probs", {0.5, 0.2}}}};
  t["n"] = 2;
  t["c"] = {1, 1};
  std::ofstream(dir / "table.json") << t.dump();
  CHECK_FALSE(validate_instance_file((dir / "table.json").string()).ok());

  std::ofstream(dir / "broken.json") << "{\n  \"n\": 1,\n  \"T\": \n}";
  const auto broken = validate_instance_file((dir / "broken.json").string());
  CHECK_FALSE(broken.ok());
  CHECK(broken.to_string().find("line") != std::string::npos);
}

TEST_CASE("canonical suite passes") {
  const auto r = run_canonical_suite();
  CHECK(r.ok());
  CHECK(r.checks.size() >= 6u);
}
