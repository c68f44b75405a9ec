#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace stanceval {

// Deterministic splittable generator (splitmix64). Streams are keyed by
// (seed, tag) so independent sampling stages draw from unrelated sequences
// and results do not depend on the order stages run in. All draws are
// platform-independent; no <random> distributions are used because their
// output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  Rng(std::uint64_t seed, std::string_view tag) : state_(mix(seed, tag)) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Unbiased draw in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n);

  // Uniform double in [0, 1), 53 bits.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  static std::uint64_t mix(std::uint64_t seed, std::string_view tag);

 private:
  std::uint64_t state_;
};

// Uniform sample of k distinct indices from [0, n), returned in ascending
// order. Requires k <= n.
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, Rng& rng);

}  // namespace stanceval
