#pragma once

#include <cstdint>
#include <span>

namespace stanceval::kernels {

// Counting kernels behind the win-matrix and rank-distance hot loops. All
// results are integer-exact, so every lane must return bit-identical values;
// the unit tests enforce scalar/SIMD equivalence on random inputs.

struct WinCounts {
  std::uint64_t greater = 0;  // combinations with a > b
  std::uint64_t equal = 0;    // combinations with a == b
};

// Counts over all |a|x|b| combinations of binned scores (values 0..127).
WinCounts pair_win_counts(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

// Number of discordant index pairs (i < j) between two rank vectors of equal
// length: pairs ordered one way by r1 and the other way by r2. Rank vectors
// are permutations, so ties cannot occur.
std::uint64_t discordant_pairs(std::span<const std::int32_t> r1, std::span<const std::int32_t> r2);

enum class Lane { scalar, avx2 };

// Lane picked at startup from CPU capabilities.
Lane active_lane();
const char* lane_name(Lane lane);

// Test hook: pin a specific lane. Returns false if the lane is unavailable
// on this machine.
bool force_lane(Lane lane);

// Reference implementations, exposed for equivalence tests.
WinCounts pair_win_counts_scalar(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);
std::uint64_t discordant_pairs_scalar(std::span<const std::int32_t> r1, std::span<const std::int32_t> r2);

#if defined(__x86_64__) || defined(_M_X64)
WinCounts pair_win_counts_avx2(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);
std::uint64_t discordant_pairs_avx2(std::span<const std::int32_t> r1, std::span<const std::int32_t> r2);
#endif

}  // namespace stanceval::kernels
