#pragma once

#include <cstdint>
#include <initializer_list>

namespace reuse_assort {

// Stateless 64-bit mixer (splitmix64 finalizer).
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives a child seed from a parent seed and a path of integer labels. The
// construction is counter based: the child depends only on (parent, labels),
// never on how many draws have been made elsewhere.
constexpr std::uint64_t split_seed(std::uint64_t parent,
                                   std::initializer_list<std::uint64_t> labels) {
  std::uint64_t h = mix64(parent ^ 0x243f6a8885a308d3ULL);
  for (std::uint64_t l : labels) h = mix64(h ^ mix64(l + 0x13198a2e03707344ULL));
  return h;
}

// Named substreams of one episode.
enum class StreamId : std::uint64_t {
  kArrivals = 1,
  kChoices = 2,
  kDurations = 3,
  kPolicy = 4,
  kRollout = 5,
};

constexpr std::uint64_t split_seed(std::uint64_t parent, StreamId id) {
  return split_seed(parent, {static_cast<std::uint64_t>(id)});
}

// A single pseudo-random stream (splitmix64). Streams are created per episode
// and per rollout, so construction has to be cheap: one word of state.
// uniform() is derived from raw output so results do not depend on the
// standard library's distribution classes.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : state_(seed) {}

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  // Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  bool bernoulli(double p) { return uniform() < p; }
  std::uint64_t next_u64() {
    const std::uint64_t x = state_;
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(x);
  }

 private:
  std::uint64_t state_;
};

}  // namespace reuse_assort
