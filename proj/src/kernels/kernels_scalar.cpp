#include "stanceval/kernels.hpp"

namespace stanceval::kernels {

WinCounts pair_win_counts_scalar(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  WinCounts c;
  for (std::uint8_t x : a) {
    for (std::uint8_t y : b) {
      if (x > y)
        ++c.greater;
      else if (x == y)
        ++c.equal;
    }
  }
  return c;
}

std::uint64_t discordant_pairs_scalar(std::span<const std::int32_t> r1, std::span<const std::int32_t> r2) {
  const std::size_t n = r1.size();
  std::uint64_t discordant = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool g1 = r1[i] > r1[j];
      const bool g2 = r2[i] > r2[j];
      if (g1 != g2) ++discordant;
    }
  }
  return discordant;
}

}  // namespace stanceval::kernels
