#include "stanceval/rng.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>

namespace stanceval {

std::uint64_t Rng::below(std::uint64_t n) {
  assert(n > 0);
  if (n == 1) return 0;
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t v;
  do {
    v = next();
  } while (v >= limit);
  return v % n;
}

std::uint64_t Rng::mix(std::uint64_t seed, std::string_view tag) {
  // FNV-1a over the tag, folded into the seed through one splitmix round.
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  Rng r(seed ^ h);
  return r.next();
}

std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, Rng& rng) {
  assert(k <= n);
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace stanceval
