#include "stanceval/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <bit>

namespace stanceval::kernels {

namespace {

// Valid-lane mask for the final partial vector of `rem` byte lanes.
inline std::uint32_t byte_tail_mask(std::size_t rem) {
  return rem >= 32 ? 0xffffffffu : ((1u << rem) - 1u);
}

}  // namespace

WinCounts pair_win_counts_avx2(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  WinCounts c;
  const std::size_t nb = b.size();
  for (std::uint8_t x : a) {
    const __m256i vx = _mm256_set1_epi8(static_cast<char>(x));
    std::size_t j = 0;
    while (j < nb) {
      const std::size_t rem = nb - j;
      __m256i vb;
      if (rem >= 32) {
        vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b.data() + j));
      } else {
        alignas(32) std::uint8_t buf[32] = {0};
        for (std::size_t k = 0; k < rem; ++k) buf[k] = b[j + k];
        vb = _mm256_load_si256(reinterpret_cast<const __m256i*>(buf));
      }
      // Bins are < 128, so signed byte compares are safe.
      const std::uint32_t mask = byte_tail_mask(rem);
      const std::uint32_t gt =
          static_cast<std::uint32_t>(_mm256_movemask_epi8(_mm256_cmpgt_epi8(vx, vb))) & mask;
      const std::uint32_t eq =
          static_cast<std::uint32_t>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(vx, vb))) & mask;
      c.greater += std::popcount(gt);
      c.equal += std::popcount(eq);
      j += rem >= 32 ? 32 : rem;
    }
  }
  return c;
}

std::uint64_t discordant_pairs_avx2(std::span<const std::int32_t> r1, std::span<const std::int32_t> r2) {
  const std::size_t n = r1.size();
  std::uint64_t discordant = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const __m256i v1 = _mm256_set1_epi32(r1[i]);
    const __m256i v2 = _mm256_set1_epi32(r2[i]);
    std::size_t j = i + 1;
    while (j < n) {
      const std::size_t rem = n - j;
      __m256i w1, w2;
      if (rem >= 8) {
        w1 = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(r1.data() + j));
        w2 = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(r2.data() + j));
      } else {
        alignas(32) std::int32_t b1[8], b2[8];
        for (std::size_t k = 0; k < 8; ++k) {
          b1[k] = k < rem ? r1[j + k] : r1[i];  // pad with r1[i]: equal, never discordant
          b2[k] = k < rem ? r2[j + k] : r2[i];
        }
        w1 = _mm256_load_si256(reinterpret_cast<const __m256i*>(b1));
        w2 = _mm256_load_si256(reinterpret_cast<const __m256i*>(b2));
      }
      const __m256i g1 = _mm256_cmpgt_epi32(v1, w1);
      const __m256i g2 = _mm256_cmpgt_epi32(v2, w2);
      const std::uint32_t mask = static_cast<std::uint32_t>(
          _mm256_movemask_ps(_mm256_castsi256_ps(_mm256_xor_si256(g1, g2))));
      discordant += std::popcount(mask);
      j += rem >= 8 ? 8 : rem;
    }
  }
  return discordant;
}

}  // namespace stanceval::kernels

#endif  // x86-64
