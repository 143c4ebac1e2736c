#include "reuse_assort/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "reuse_assort/errors.hpp"

namespace reuse_assort {

// ---------------------------------------------------------------------------
// InventoryState

InventoryState::InventoryState(std::vector<int> capacity)
    : capacity_(std::move(capacity)), avail_(capacity_), gone_(capacity_.size(), 0),
      returns_(capacity_.size()) {}

int InventoryState::pending(int i) const {
  int total = 0;
  for (const auto& [due, count] : returns_[i]) total += count;
  return total;
}

ProductSet InventoryState::available_set() const {
  ProductSet s;
  for (int i = 0; i < num_products(); ++i) {
    if (avail_[i] > 0) s.insert(i);
  }
  return s;
}

bool InventoryState::all_exhausted() const {
  return std::all_of(avail_.begin(), avail_.end(), [](int a) { return a == 0; });
}

void InventoryState::release(int t) {
  for (int i = 0; i < num_products(); ++i) {
    auto& due = returns_[i];
    while (!due.empty() && due.begin()->first <= t) {
      avail_[i] += due.begin()->second;
      due.erase(due.begin());
    }
  }
}

void InventoryState::allocate(int i, int t, int duration, int horizon) {
  if (avail_[i] <= 0) {
    throw PolicyError("allocation of product " + std::to_string(i) + " with no unit on hand");
  }
  --avail_[i];
  if (duration == kInfiniteDuration || t + duration > horizon) {
    ++gone_[i];
  } else {
    ++returns_[i][t + duration];
  }
}

bool InventoryState::consistent(int t) const {
  for (int i = 0; i < num_products(); ++i) {
    if (avail_[i] < 0 || gone_[i] < 0) return false;
    if (avail_[i] + pending(i) + gone_[i] != capacity_[i]) return false;
    if (!returns_[i].empty() && returns_[i].begin()->first <= t) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Episodes

EpisodeResult run_from(const Instance& inst, PolicySession& session, int t_start,
                       InventoryState inv, std::uint64_t seed, const EpisodeOptions& options) {
  Stream arrivals(split_seed(seed, StreamId::kArrivals));
  Stream choices(split_seed(seed, StreamId::kChoices));
  Stream durations(split_seed(seed, StreamId::kDurations));
  Stream policy_stream(split_seed(seed, StreamId::kPolicy));
  const int T = inst.horizon();
  EpisodeResult res;
  if (options.record_trace) res.trace.reserve(std::max(0, T - t_start + 1));
  for (int t = t_start; t <= T; ++t) {
    inv.release(t);
    const int z = inst.sample_type(t, arrivals.uniform());
    ProductSet offer = session.decide(t, z, inv, policy_stream);
    const ProductSet usable = offer & inv.available_set();
    if (usable != offer || !inst.family().contains(offer)) {
      ++res.infeasible_offers;
      offer = usable;
      while (!inst.family().contains(offer)) offer.erase(offer.to_vector().back());
    }
    const auto& ty = inst.type(z);
    const int chosen = sample_choice(ty.choice, offer, choices);
    const double u_duration = durations.uniform();
    StepRecord rec{t, z, offer, chosen, 0.0, 0};
    if (chosen != kOutside) {
      const int d = ty.durations[chosen].sample(u_duration);
      inv.allocate(chosen, t, d, T);
      rec.fee = ty.fees[chosen];
      rec.duration = d;
      res.revenue += rec.fee;
    }
    if (options.check_state && !inv.consistent(t)) ++res.inconsistent_states;
    if (options.record_trace) res.trace.push_back(rec);
  }
  return res;
}

EpisodeResult run_episode(const Instance& inst, const Policy& policy, std::uint64_t seed,
                          const EpisodeOptions& options) {
  auto session = policy.new_session(seed);
  return run_from(inst, *session, 1, InventoryState(inst.inventories()), seed, options);
}

std::uint64_t episode_seed(std::uint64_t master_seed, int run_id) {
  return split_seed(master_seed, {static_cast<std::uint64_t>(run_id)});
}

namespace {

double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * (sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - lo) * (sorted[hi] - sorted[lo]);
}

}  // namespace

MCStats summarize(std::vector<double> revenues) {
  MCStats s;
  s.revenues = std::move(revenues);
  const std::size_t n = s.revenues.size();
  if (n == 0) return s;
  double sum = 0.0;
  for (double r : s.revenues) sum += r;
  s.mean = sum / n;
  if (n > 1) {
    double ss = 0.0;
    for (double r : s.revenues) ss += (r - s.mean) * (r - s.mean);
    s.se = std::sqrt(ss / (n - 1) / n);
  }
  std::vector<double> sorted = s.revenues;
  std::sort(sorted.begin(), sorted.end());
  s.min = sorted.front();
  s.max = sorted.back();
  s.median = quantile(sorted, 0.5);
  s.q1 = quantile(sorted, 0.25);
  s.q3 = quantile(sorted, 0.75);
  return s;
}

MCStats monte_carlo(const Instance& inst, const Policy& policy, int n_runs,
                    std::uint64_t master_seed, int threads, bool check_state) {
  std::vector<double> revenue(std::max(0, n_runs), 0.0);
  std::vector<int> infeasible(revenue.size(), 0);
  std::vector<int> inconsistent(revenue.size(), 0);
  int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, std::max(1, n_runs));
  std::atomic<int> next{0};
  EpisodeOptions opts;
  opts.check_state = check_state;
  auto work = [&] {
    for (int r = next++; r < n_runs; r = next++) {
      const EpisodeResult res = run_episode(inst, policy, episode_seed(master_seed, r), opts);
      revenue[r] = res.revenue;
      infeasible[r] = res.infeasible_offers;
      inconsistent[r] = res.inconsistent_states;
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  MCStats s = summarize(std::move(revenue));
  s.policy = policy.name();
  for (int v : infeasible) s.infeasible_offers += v;
  for (int v : inconsistent) s.inconsistent_states += v;
  return s;
}

double paired_se(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("paired_se: sizes differ");
  std::vector<double> d(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) d[k] = a[k] - b[k];
  return summarize(std::move(d)).se;
}

double clairvoyant_offline_ec21(int horizon, std::uint64_t seed) {
  if (horizon < 1) throw ModelError("horizon must be >= 1");
  Stream durations(split_seed(seed, StreamId::kDurations));
  double revenue = 1.0;  // the last rental, whatever its duration
  for (int t = 1; t < horizon; ++t) {
    if (durations.uniform() < 0.5) revenue += 1.0;
  }
  return revenue;
}

std::string trace_to_jsonl(const EpisodeResult& result) {
  std::ostringstream os;
  for (const auto& r : result.trace) {
    nlohmann::json j = {{"t", r.t},
                        {"type", r.type},
                        {"offered", r.offered.to_vector()},
                        {"chosen", r.chosen},
                        {"fee", r.fee}};
    if (r.duration == kInfiniteDuration) {
      j["duration"] = "inf";
    } else {
      j["duration"] = r.duration;
    }
    os << j.dump() << "\n";
  }
  return os.str();
}

}  // namespace reuse_assort
