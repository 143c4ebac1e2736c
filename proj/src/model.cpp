#include "reuse_assort/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "reuse_assort/errors.hpp"

namespace reuse_assort {

namespace {

constexpr double kProbSumTol = 1e-12;
constexpr int kMaxEnumeratedProducts = 20;
constexpr int kMaxCheckedProducts = 10;

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::string ProductSet::to_string() const {
  std::string out = "{";
  bool first = true;
  for_each([&](int i) {
    if (!first) out += ",";
    out += std::to_string(i);
    first = false;
  });
  return out + "}";
}

// ---------------------------------------------------------------------------
// DurationDist

DurationDist::DurationDist() : survival_{1.0}, infinite_mass_(1.0) {}

DurationDist DurationDist::fixed(int periods) {
  return DurationDist(std::vector<DurationEntry>{{periods, 1.0}});
}

DurationDist::DurationDist(std::vector<DurationEntry> entries) {
  double total = 0.0;
  double inf_mass = 0.0;
  std::map<int, double> finite;
  for (const auto& e : entries) {
    if (!(e.prob >= 0.0)) throw ModelError("duration probability must be non-negative");
    total += e.prob;
    if (e.periods == kInfiniteDuration) {
      inf_mass += e.prob;
    } else if (e.periods >= 1) {
      finite[e.periods] += e.prob;
    } else {
      throw ModelError("finite durations must be >= 1, got " + std::to_string(e.periods));
    }
  }
  if (std::abs(total - 1.0) > kProbSumTol) {
    throw ModelError("duration probabilities sum to " + fmt_double(total));
  }
  for (const auto& [d, p] : finite) {
    if (p > 0.0) finite_.push_back({d, p});
  }
  infinite_mass_ = inf_mass;

  const int dmax = max_finite();
  survival_.assign(dmax + 1, 1.0);
  cdf_.reserve(finite_.size());
  double acc = 0.0;
  std::size_t next = 0;
  for (int k = 1; k <= dmax; ++k) {
    while (next < finite_.size() && finite_[next].periods == k) {
      acc += finite_[next].prob;
      cdf_.push_back(acc);
      ++next;
    }
    survival_[k] = std::max(0.0, 1.0 - acc);
  }
  if (finite_.empty()) infinite_mass_ = 1.0;
}

double DurationDist::survival(int k) const {
  if (k < 0) return 1.0;
  if (k < static_cast<int>(survival_.size())) return survival_[k];
  return is_infinite() ? 1.0 : survival_.back();
}

double DurationDist::pmf(int periods) const {
  if (periods == kInfiniteDuration) return infinite_mass_;
  auto it = std::lower_bound(finite_.begin(), finite_.end(), periods,
                             [](const DurationEntry& e, int d) { return e.periods < d; });
  return (it != finite_.end() && it->periods == periods) ? it->prob : 0.0;
}

std::vector<DurationEntry> DurationDist::entries() const {
  std::vector<DurationEntry> out(finite_.begin(), finite_.end());
  if (infinite_mass_ > 0.0) out.push_back({kInfiniteDuration, infinite_mass_});
  return out;
}

int DurationDist::sample(double u) const {
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) {
    // u fell into the infinite mass, or past the last finite entry by rounding.
    return infinite_mass_ > 0.0 ? kInfiniteDuration : finite_.back().periods;
  }
  return finite_[static_cast<std::size_t>(it - cdf_.begin())].periods;
}

// ---------------------------------------------------------------------------
// ChoiceModel

ChoiceModel ChoiceModel::mnl(double outside_weight, std::vector<double> weights) {
  if (!(outside_weight >= 0.0)) throw ModelError("MNL outside weight must be >= 0");
  for (double w : weights) {
    if (!(w >= 0.0)) throw ModelError("MNL product weights must be >= 0");
  }
  if (static_cast<int>(weights.size()) > ProductSet::kMaxProducts) {
    throw ModelError("too many products");
  }
  ChoiceModel m;
  m.num_products_ = static_cast<int>(weights.size());
  m.params_ = MnlParams{outside_weight, std::move(weights)};
  return m;
}

ChoiceModel ChoiceModel::explicit_table(int num_products, Table table) {
  if (num_products < 0 || num_products > ProductSet::kMaxProducts) {
    throw ModelError("too many products");
  }
  for (auto& [s, row] : table) {
    if (static_cast<int>(row.size()) != num_products) {
      throw ModelError("choice table row for " + s.to_string() + " has wrong length");
    }
    if (!s.subset_of(ProductSet::full(num_products))) {
      throw ModelError("choice table subset out of range: " + s.to_string());
    }
  }
  ChoiceModel m;
  m.num_products_ = num_products;
  m.params_ = std::move(table);
  return m;
}

double ChoiceModel::prob(ProductSet s, int i) const {
  if (!s.contains(i)) return 0.0;
  if (const auto* p = as_mnl()) {
    double denom = p->outside_weight;
    s.for_each([&](int l) { denom += p->weights[l]; });
    return denom > 0.0 ? p->weights[i] / denom : 0.0;
  }
  const auto& table = std::get<Table>(params_);
  auto it = table.find(s);
  if (it == table.end()) throw ModelError("choice table has no entry for " + s.to_string());
  return it->second[i];
}

void ChoiceModel::probs(ProductSet s, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  if (s.empty()) return;
  if (const auto* p = as_mnl()) {
    double denom = p->outside_weight;
    s.for_each([&](int l) { denom += p->weights[l]; });
    if (denom <= 0.0) return;
    s.for_each([&](int l) { out[l] = p->weights[l] / denom; });
    return;
  }
  const auto& table = std::get<Table>(params_);
  auto it = table.find(s);
  if (it == table.end()) throw ModelError("choice table has no entry for " + s.to_string());
  s.for_each([&](int l) { out[l] = it->second[l]; });
}

std::optional<std::string> ChoiceModel::find_assumption_violation() const {
  const int n = num_products_;
  if (n > kMaxCheckedProducts) return std::nullopt;
  const std::uint32_t limit = std::uint32_t{1} << n;
  const Table* table = as_table();
  auto present = [&](ProductSet s) { return !table || s.empty() || table->count(s) > 0; };

  if (table) {
    for (const auto& [s, row] : *table) {
      for (int i = 0; i < n; ++i) {
        if (row[i] < 0.0 || row[i] > 1.0) {
          return "phi(" + s.to_string() + ", " + std::to_string(i) + ") outside [0, 1]";
        }
        if (!s.contains(i) && row[i] != 0.0) {
          return "phi(" + s.to_string() + ", " + std::to_string(i) +
                 ") must be 0 for a product not offered";
        }
      }
      if (s.empty()) {
        for (int i = 0; i < n; ++i) {
          if (row[i] != 0.0) return "phi(empty, i) must be 0";
        }
      }
    }
  }
  for (std::uint32_t bits = 0; bits < limit; ++bits) {
    ProductSet s(bits);
    if (!present(s)) continue;
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += prob(s, i);
    if (total > 1.0 + 1e-12) {
      return "choice probabilities of " + s.to_string() + " sum to " + fmt_double(total);
    }
    for (int j = 0; j < n; ++j) {
      if (s.contains(j)) continue;
      ProductSet bigger = s;
      bigger.insert(j);
      if (!present(bigger)) continue;
      for (int i = 0; i < n; ++i) {
        if (!s.contains(i)) continue;
        if (prob(s, i) + 1e-12 < prob(bigger, i)) {
          return "weak substitutability fails: phi(" + s.to_string() + ", " +
                 std::to_string(i) + ") < phi(" + bigger.to_string() + ", " +
                 std::to_string(i) + ")";
        }
      }
    }
  }
  return std::nullopt;
}

FeasibleFamily FeasibleFamily::max_cardinality(int k) {
  if (k < 0) throw ModelError("cardinality limit must be >= 0");
  FeasibleFamily f;
  f.max_cardinality_ = k;
  return f;
}

// ---------------------------------------------------------------------------
// Instance

Instance Instance::unchecked(std::vector<int> inventory, int horizon,
                             std::vector<ConsumerType> types,
                             std::vector<std::vector<double>> arrival, FeasibleFamily family) {
  Instance inst;
  inst.inventory_ = std::move(inventory);
  inst.horizon_ = horizon;
  inst.types_ = std::move(types);
  inst.arrival_ = std::move(arrival);
  inst.family_ = family;
  inst.build_cdfs();
  return inst;
}

Instance::Instance(std::vector<int> inventory, int horizon, std::vector<ConsumerType> types,
                   std::vector<std::vector<double>> arrival, FeasibleFamily family) {
  *this = unchecked(std::move(inventory), horizon, std::move(types), std::move(arrival),
                    family);
  for (const auto& r : check()) {
    if (!r.passed) throw ModelError(r.name + ": " + r.detail);
  }
}

void Instance::build_cdfs() {
  arrival_cdf_.clear();
  arrival_cdf_.reserve(arrival_.size());
  for (const auto& row : arrival_) {
    std::vector<double> cdf(row.size());
    std::partial_sum(row.begin(), row.end(), cdf.begin());
    arrival_cdf_.push_back(std::move(cdf));
  }
}

std::vector<CheckResult> Instance::check() const {
  std::vector<CheckResult> out;
  const int n = num_products();

  CheckResult shape{"shape", true, ""};
  if (n < 1 || n > ProductSet::kMaxProducts) {
    shape = {"shape", false, "product count must be in [1, 32]"};
  } else if (horizon_ < 1) {
    shape = {"shape", false, "horizon T must be >= 1"};
  } else if (types_.empty()) {
    shape = {"shape", false, "type table is empty"};
  } else if (static_cast<int>(arrival_.size()) != horizon_) {
    shape = {"shape", false, "arrival has " + std::to_string(arrival_.size()) +
                                 " rows, expected T = " + std::to_string(horizon_)};
  } else {
    for (const auto& ty : types_) {
      if (static_cast<int>(ty.fees.size()) != n || static_cast<int>(ty.durations.size()) != n ||
          ty.choice.num_products() != n) {
        shape = {"shape", false, "type '" + ty.id + "' vectors do not have length n"};
        break;
      }
    }
    for (const auto& row : arrival_) {
      if (row.size() != types_.size()) {
        shape = {"shape", false, "arrival row length differs from type count"};
        break;
      }
    }
  }
  out.push_back(shape);
  if (!shape.passed) return out;

  CheckResult inv{"inventory", true, ""};
  for (int i = 0; i < n; ++i) {
    if (inventory_[i] < 1) {
      inv = {"inventory", false, "c_" + std::to_string(i) + " must be >= 1"};
      break;
    }
  }
  out.push_back(inv);

  CheckResult fees{"fees", true, ""};
  for (const auto& ty : types_) {
    for (double r : ty.fees) {
      if (!(r >= 0.0)) {
        fees = {"fees", false, "type '" + ty.id + "' has a negative fee"};
        break;
      }
    }
  }
  out.push_back(fees);

  CheckResult arr{"arrival-normalization", true, ""};
  for (int t = 1; t <= horizon_; ++t) {
    double total = 0.0;
    bool negative = false;
    for (double p : arrival_[t - 1]) {
      total += p;
      negative |= !(p >= 0.0);
    }
    if (negative || std::abs(total - 1.0) > kProbSumTol) {
      arr = {"arrival-normalization", false,
             "arrival probabilities at t = " + std::to_string(t) + " sum to " + fmt_double(total)};
      break;
    }
  }
  out.push_back(arr);

  CheckResult choice{"choice-assumptions", true, ""};
  for (const auto& ty : types_) {
    if (auto v = ty.choice.find_assumption_violation()) {
      choice = {"choice-assumptions", false, "type '" + ty.id + "': " + *v};
      break;
    }
  }
  out.push_back(choice);
  return out;
}

int Instance::min_inventory() const {
  return *std::min_element(inventory_.begin(), inventory_.end());
}

int Instance::sample_type(int t, double u) const {
  const auto& cdf = arrival_cdf_[t - 1];
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  int z = static_cast<int>(it - cdf.begin());
  if (z >= num_types()) z = num_types() - 1;
  // Never return a zero-probability type because of rounding at the top end.
  while (z > 0 && arrival_[t - 1][z] == 0.0) --z;
  return z;
}

bool Instance::product_non_reusable(int i) const {
  return std::all_of(types_.begin(), types_.end(),
                     [i](const ConsumerType& ty) { return ty.durations[i].is_infinite(); });
}

bool Instance::fully_non_reusable() const {
  for (int i = 0; i < num_products(); ++i) {
    if (!product_non_reusable(i)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Oracle and choice sampling

double choice_prob(const ChoiceModel& model, ProductSet s, int i) {
  if (i < 0 || i >= model.num_products()) {
    throw std::out_of_range("product index " + std::to_string(i) + " out of range");
  }
  if (!s.subset_of(ProductSet::full(model.num_products()))) {
    throw std::out_of_range("assortment " + s.to_string() + " out of range");
  }
  return model.prob(s, i);
}

double assortment_value(const ChoiceModel& model, std::span<const double> weights,
                        ProductSet s) {
  double v = 0.0;
  s.for_each([&](int i) { v += weights[i] * model.prob(s, i); });
  return v;
}

namespace {

ProductSet nonnegative_candidates(const ChoiceModel& model, std::span<const double> weights) {
  if (static_cast<int>(weights.size()) != model.num_products()) {
    throw ModelError("oracle weight vector has wrong length");
  }
  ProductSet cand;
  for (int i = 0; i < model.num_products(); ++i) {
    if (weights[i] >= 0.0) cand.insert(i);
  }
  return cand;
}

bool better(double value, ProductSet s, double best_value, ProductSet best) {
  const double tol = 1e-12 * (1.0 + std::abs(best_value));
  if (value > best_value + tol) return true;
  if (value < best_value - tol) return false;
  return ProductSet::canonical_less(s, best);
}

ProductSet enumerate(const ChoiceModel& model, std::span<const double> weights,
                     const FeasibleFamily& family, ProductSet cand) {
  if (cand.size() > kMaxEnumeratedProducts) {
    throw GuardError("model", "offline oracle: " + std::to_string(cand.size()) +
                                  " candidate products exceed the enumeration limit");
  }
  const std::vector<int> items = cand.to_vector();
  const std::uint32_t limit = std::uint32_t{1} << items.size();
  ProductSet best;
  double best_value = 0.0;
  for (std::uint32_t code = 1; code < limit; ++code) {
    ProductSet s;
    for (std::size_t k = 0; k < items.size(); ++k) {
      if ((code >> k) & 1u) s.insert(items[k]);
    }
    if (!family.contains(s)) continue;
    const double v = assortment_value(model, weights, s);
    if (better(v, s, best_value, best)) {
      best = s;
      best_value = v;
    }
  }
  return best;
}

}  // namespace

ProductSet offline_oracle_brute_force(const ChoiceModel& model, std::span<const double> weights,
                                      const FeasibleFamily& family) {
  return enumerate(model, weights, family, nonnegative_candidates(model, weights));
}

ProductSet offline_oracle(const ChoiceModel& model, std::span<const double> weights,
                          const FeasibleFamily& family) {
  ProductSet cand = nonnegative_candidates(model, weights);
  const MnlParams* mnl = model.as_mnl();
  if (mnl == nullptr || family.cardinality_limit()) {
    return enumerate(model, weights, family, cand);
  }
  // Under MNL without a cardinality limit an optimal assortment is a prefix of
  // the candidates sorted by weight. Zero-attraction products never change the
  // value, so they are left out.
  std::vector<int> order;
  cand.for_each([&](int i) {
    if (mnl->weights[i] > 0.0) order.push_back(i);
  });
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return weights[a] > weights[b]; });
  ProductSet best;
  double best_value = 0.0;
  ProductSet prefix;
  double num = 0.0;
  double denom = mnl->outside_weight;
  for (int i : order) {
    prefix.insert(i);
    num += weights[i] * mnl->weights[i];
    denom += mnl->weights[i];
    const double v = denom > 0.0 ? num / denom : 0.0;
    if (better(v, prefix, best_value, best)) {
      best = prefix;
      best_value = v;
    }
  }
  return best;
}

int sample_choice(const ChoiceModel& model, ProductSet s, Stream& stream) {
  const double u = stream.uniform();
  if (s.empty()) return kOutside;
  double acc = 0.0;
  int chosen = kOutside;
  s.for_each([&](int i) {
    if (chosen != kOutside) return;
    acc += model.prob(s, i);
    if (u < acc) chosen = i;
  });
  return chosen;
}

}  // namespace reuse_assort
