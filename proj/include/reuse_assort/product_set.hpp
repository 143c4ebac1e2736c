#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

namespace reuse_assort {

// A subset of products, stored as a bitmask. Product indices are 0-based and
// limited to kMaxProducts.
class ProductSet {
 public:
  static constexpr int kMaxProducts = 32;

  constexpr ProductSet() = default;
  constexpr explicit ProductSet(std::uint32_t bits) : bits_(bits) {}

  static ProductSet of(std::initializer_list<int> items) {
    ProductSet s;
    for (int i : items) s.insert(i);
    return s;
  }
  static ProductSet from_vector(const std::vector<int>& items) {
    ProductSet s;
    for (int i : items) s.insert(i);
    return s;
  }
  // {0, ..., n-1}
  static constexpr ProductSet full(int n) {
    return ProductSet(n >= kMaxProducts ? ~std::uint32_t{0}
                                        : ((std::uint32_t{1} << n) - 1));
  }

  constexpr std::uint32_t bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr bool contains(int i) const { return (bits_ >> i) & 1u; }
  constexpr void insert(int i) { bits_ |= (std::uint32_t{1} << i); }
  constexpr void erase(int i) { bits_ &= ~(std::uint32_t{1} << i); }
  constexpr bool subset_of(ProductSet other) const {
    return (bits_ & ~other.bits_) == 0;
  }
  constexpr ProductSet operator|(ProductSet o) const { return ProductSet(bits_ | o.bits_); }
  constexpr ProductSet operator&(ProductSet o) const { return ProductSet(bits_ & o.bits_); }
  constexpr ProductSet minus(ProductSet o) const { return ProductSet(bits_ & ~o.bits_); }

  // Calls f(i) for every member in increasing order.
  template <class F>
  constexpr void for_each(F&& f) const {
    std::uint32_t b = bits_;
    while (b != 0) {
      int i = std::countr_zero(b);
      f(i);
      b &= b - 1;
    }
  }

  std::vector<int> to_vector() const {
    std::vector<int> out;
    out.reserve(size());
    for_each([&](int i) { out.push_back(i); });
    return out;
  }

  // Deterministic order: smaller cardinality first, then lexicographic on the
  // sorted member lists.
  static bool canonical_less(ProductSet a, ProductSet b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a.to_vector() < b.to_vector();
  }

  std::string to_string() const;

  friend constexpr bool operator==(ProductSet, ProductSet) = default;
  friend constexpr auto operator<=>(ProductSet a, ProductSet b) { return a.bits_ <=> b.bits_; }

 private:
  std::uint32_t bits_ = 0;
};

}  // namespace reuse_assort
