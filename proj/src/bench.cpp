#include "reuse_assort/bench.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>

#include "reuse_assort/errors.hpp"
#include "reuse_assort/rng.hpp"

namespace reuse_assort {

std::string to_string(Scenario s) { return s == Scenario::kRental ? "RENTAL" : "NO_RENTAL"; }

Scenario parse_scenario(const std::string& name) {
  std::string up = name;
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return std::toupper(c); });
  if (up == "RENTAL") return Scenario::kRental;
  if (up == "NO_RENTAL") return Scenario::kNoRental;
  throw ModelError("unknown scenario \"" + name + "\" (expected NO_RENTAL or RENTAL)");
}

namespace {

constexpr int kProducts = 6;

double eta(int j, double kappa) { return 1.0 + 2.0 * kappa * (kProducts - j) / 5.0; }

// d = base + X with X geometric on {1, 2, ...} of the given mean, truncated at
// the horizon; the tail beyond it is stored as never returning.
DurationDist shifted_geometric(int base, double mean, int horizon) {
  const double p = 1.0 / mean;
  std::vector<DurationEntry> entries;
  double mass = 0.0;
  double term = p;
  for (int x = 1; base + x <= horizon; ++x) {
    entries.push_back({base + x, term});
    mass += term;
    term *= (1.0 - p);
  }
  const double tail = 1.0 - mass;
  if (tail > 0.0) entries.push_back({kInfiniteDuration, tail});
  return DurationDist(std::move(entries));
}

}  // namespace

Instance gen_ec8(double kappa, Scenario scenario, std::uint64_t instance_seed,
                 const Ec8Options& options) {
  if (!(kappa >= 0.0)) throw ModelError("kappa must be >= 0");
  const int T = options.horizon;
  if (T < 1) throw ModelError("horizon must be >= 1");
  const int c = options.inventory.value_or(scenario == Scenario::kRental ? 20 : 30);
  Stream rng(split_seed(instance_seed, {0xec8}));

  std::vector<ConsumerType> types;
  for (int j = 1; j <= kProducts; ++j) {
    std::vector<double> alpha(kProducts, 0.0);
    double total = 0.0;
    for (int i = 0; i < j; ++i) {
      alpha[i] = rng.uniform(0.9, 1.1);
      total += alpha[i];
    }
    const double alpha0 = (0.1 / 0.9) * total;

    const double e = eta(j, kappa);
    std::vector<double> fees(kProducts);
    for (double& f : fees) f = rng.uniform(10.0 * e, 25.0 * e);
    std::sort(fees.begin(), fees.end(), std::greater<>());

    const double mean = rng.uniform(20.0 * eta(7 - j, kappa), 30.0 * eta(7 - j, kappa));
    std::vector<DurationDist> durations(kProducts);
    if (scenario == Scenario::kRental) {
      const DurationDist d = shifted_geometric(T / 10, mean, T);
      std::fill(durations.begin(), durations.end(), d);
    }
    types.push_back({"type" + std::to_string(j), ChoiceModel::mnl(alpha0, std::move(alpha)),
                     std::move(fees), std::move(durations)});
  }

  const double tau = T / 6.0;
  std::vector<std::vector<double>> arrival(T, std::vector<double>(kProducts));
  for (int t = 1; t <= T; ++t) {
    double total = 0.0;
    for (int j = 1; j <= kProducts; ++j) {
      const double center = (kProducts - j) * tau + 1.0;
      const double w = std::exp(-0.001 * kappa * std::abs(t - center));
      arrival[t - 1][j - 1] = w;
      total += w;
    }
    for (double& p : arrival[t - 1]) p /= total;
  }
  return Instance(std::vector<int>(kProducts, c), T, std::move(types), std::move(arrival),
                  FeasibleFamily::all_subsets());
}

Instance gen_footnote9(double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) throw ModelError("eps must lie in (0, 1]");
  std::vector<ConsumerType> types;
  types.push_back({"sure", ChoiceModel::mnl(0.0, {1.0}), {1.0}, {DurationDist::infinite()}});
  types.push_back({"rare", ChoiceModel::mnl(0.0, {1.0}), {1.0 / eps}, {DurationDist::infinite()}});
  types.push_back({"none", ChoiceModel::mnl(1.0, {0.0}), {0.0}, {DurationDist::infinite()}});
  std::vector<std::vector<double>> arrival = {{1.0, 0.0, 0.0}, {0.0, eps, 1.0 - eps}};
  return Instance({1}, 2, std::move(types), std::move(arrival), FeasibleFamily::all_subsets());
}

Instance gen_ec21(int horizon) {
  if (horizon < 1) throw ModelError("horizon must be >= 1");
  DurationDist d({{1, 0.5}, {kInfiniteDuration, 0.5}});
  std::vector<ConsumerType> types;
  types.push_back({"unit", ChoiceModel::mnl(0.0, {1.0}), {1.0}, {d}});
  std::vector<std::vector<double>> arrival(horizon, std::vector<double>{1.0});
  return Instance({1}, horizon, std::move(types), std::move(arrival),
                  FeasibleFamily::all_subsets());
}

}  // namespace reuse_assort
