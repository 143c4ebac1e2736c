#pragma once

#include <span>
#include <utility>
#include <vector>

#include "reuse_assort/model.hpp"
#include "reuse_assort/rng.hpp"

namespace reuse_assort {

// One level of the prefix sampler: members of S ordered by target ratio
// p_i / phi(S, i) (descending, ties by index) and the probability q[j] of
// keeping the first j of them, j = 0..|S|.
struct PrefixWeights {
  std::vector<int> order;
  std::vector<double> ratio;  // aligned with order, clamped to [0, 1]
  std::vector<double> q;      // size |S| + 1
};

// targets is indexed by product and must satisfy
// 0 <= targets[i] <= phi(S, i) + 1e-12 for i in S; throws SamplingError
// otherwise. Entries for products outside S are ignored.
PrefixWeights prefix_weights(const ChoiceModel& model, ProductSet s,
                             std::span<const double> targets);

// Draws a random subset S~ of S with E[phi(S~, i)] = targets[i] for every
// i in S. Consumes one uniform per recursion level.
ProductSet sub_assortment_sample(const ChoiceModel& model, ProductSet s,
                                 std::span<const double> targets, Stream& stream);

// Exact output distribution of sub_assortment_sample, one entry per distinct
// subset with positive probability, ordered canonically. |S| <= 8.
std::vector<std::pair<ProductSet, double>> enumerate_sample_distribution(
    const ChoiceModel& model, ProductSet s, std::span<const double> targets);

}  // namespace reuse_assort
