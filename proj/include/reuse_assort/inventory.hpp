#pragma once

#include <map>
#include <vector>

#include "reuse_assort/product_set.hpp"

namespace reuse_assort {

// On-hand units and scheduled returns of every product during an episode.
// Units whose return falls after the horizon (or never) are counted as gone.
class InventoryState {
 public:
  explicit InventoryState(std::vector<int> capacity);

  int num_products() const { return static_cast<int>(capacity_.size()); }
  int capacity(int i) const { return capacity_[i]; }
  int available(int i) const { return avail_[i]; }
  const std::vector<int>& available_counts() const { return avail_; }
  // Units out and due back within the horizon.
  int pending(int i) const;
  // Units out that will not come back before the horizon ends.
  int gone(int i) const { return gone_[i]; }
  ProductSet available_set() const;
  bool all_exhausted() const;

  // Makes the units due at period t available again.
  void release(int t);
  // Rents one unit of product i at period t. Throws PolicyError when no unit
  // is on hand.
  void allocate(int i, int t, int duration, int horizon);

  // avail + pending + gone = capacity, avail >= 0 and all due dates > t.
  bool consistent(int t) const;

 private:
  std::vector<int> capacity_;
  std::vector<int> avail_;
  std::vector<int> gone_;
  std::vector<std::map<int, int>> returns_;  // due period -> count
};

}  // namespace reuse_assort
