#include "reuse_assort/sampling.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <string>

#include "reuse_assort/errors.hpp"

namespace reuse_assort {

namespace {

constexpr double kSlack = 1e-12;

// Set made of the first k members of w.order.
ProductSet prefix(const PrefixWeights& w, int k) {
  ProductSet s;
  for (int j = 0; j < k; ++j) s.insert(w.order[j]);
  return s;
}

void expand(const ChoiceModel& model, ProductSet s, std::span<const double> targets, double mass,
            std::map<ProductSet, double>& out) {
  if (s.empty()) {
    out[s] += mass;
    return;
  }
  const PrefixWeights w = prefix_weights(model, s, targets);
  const int m = static_cast<int>(w.order.size());
  if (w.q[m] == 1.0) {
    out[s] += mass;
    return;
  }
  std::vector<double> next(targets.size(), 0.0);
  s.for_each([&](int i) { next[i] = model.prob(s, i); });
  for (int j = 0; j <= m; ++j) {
    if (w.q[j] <= 0.0) continue;
    if (j == 0) {
      out[ProductSet{}] += mass * w.q[0];
    } else if (j == m) {
      out[s] += mass * w.q[m];
    } else {
      expand(model, prefix(w, j), next, mass * w.q[j], out);
    }
  }
}

}  // namespace

PrefixWeights prefix_weights(const ChoiceModel& model, ProductSet s,
                             std::span<const double> targets) {
  PrefixWeights w;
  w.order = s.to_vector();
  if (static_cast<int>(targets.size()) < model.num_products()) {
    throw SamplingError("targets must have one entry per product");
  }
  std::vector<double> ratio(model.num_products(), 1.0);
  for (int i : w.order) {
    const double phi = model.prob(s, i);
    const double p = targets[i];
    if (p < -kSlack || p > phi + kSlack) {
      throw SamplingError("target " + std::to_string(p) + " for product " + std::to_string(i) +
                          " outside [0, " + std::to_string(phi) + "]");
    }
    ratio[i] = phi > 0.0 ? std::clamp(p / phi, 0.0, 1.0) : 1.0;
  }
  std::stable_sort(w.order.begin(), w.order.end(),
                   [&](int a, int b) { return ratio[a] > ratio[b]; });
  const int m = static_cast<int>(w.order.size());
  w.ratio.resize(m);
  for (int j = 0; j < m; ++j) w.ratio[j] = ratio[w.order[j]];
  w.q.assign(m + 1, 0.0);
  if (m == 0) {
    w.q[0] = 1.0;
    return w;
  }
  w.q[0] = 1.0 - w.ratio[0];
  for (int j = 1; j < m; ++j) w.q[j] = w.ratio[j - 1] - w.ratio[j];
  w.q[m] = w.ratio[m - 1];
  return w;
}

ProductSet sub_assortment_sample(const ChoiceModel& model, ProductSet s,
                                 std::span<const double> targets, Stream& stream) {
  std::vector<double> current(targets.begin(), targets.end());
  while (!s.empty()) {
    const PrefixWeights w = prefix_weights(model, s, current);
    const int m = static_cast<int>(w.order.size());
    if (w.q[m] == 1.0) return s;
    const double u = stream.uniform();
    double acc = 0.0;
    int pick = m;
    for (int j = 0; j <= m; ++j) {
      acc += w.q[j];
      if (u < acc) {
        pick = j;
        break;
      }
    }
    if (pick == 0) return ProductSet{};
    if (pick == m) return s;
    s.for_each([&](int i) { current[i] = model.prob(s, i); });
    s = prefix(w, pick);
  }
  return s;
}

std::vector<std::pair<ProductSet, double>> enumerate_sample_distribution(
    const ChoiceModel& model, ProductSet s, std::span<const double> targets) {
  if (s.size() > 8) throw GuardError("sampling", "exact enumeration needs |S| <= 8");
  std::map<ProductSet, double> acc;
  expand(model, s, targets, 1.0, acc);
  std::vector<std::pair<ProductSet, double>> out;
  for (const auto& [set, p] : acc) {
    if (p > 0.0) out.emplace_back(set, p);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return ProductSet::canonical_less(a.first, b.first);
  });
  return out;
}

}  // namespace reuse_assort
