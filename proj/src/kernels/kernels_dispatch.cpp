#include "stanceval/kernels.hpp"

namespace stanceval::kernels {

namespace {

#if defined(__x86_64__) || defined(_M_X64)
bool cpu_has_avx2() {
#if defined(__GNUC__) || defined(__clang__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}
#endif

Lane detect_lane() {
#if defined(__x86_64__) || defined(_M_X64)
  if (cpu_has_avx2()) return Lane::avx2;
#endif
  return Lane::scalar;
}

Lane g_lane = detect_lane();

}  // namespace

Lane active_lane() { return g_lane; }

const char* lane_name(Lane lane) {
  switch (lane) {
    case Lane::avx2: return "avx2";
    case Lane::scalar: return "scalar";
  }
  return "scalar";
}

bool force_lane(Lane lane) {
#if defined(__x86_64__) || defined(_M_X64)
  if (lane == Lane::avx2 && !cpu_has_avx2()) return false;
#else
  if (lane == Lane::avx2) return false;
#endif
  g_lane = lane;
  return true;
}

WinCounts pair_win_counts(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
#if defined(__x86_64__) || defined(_M_X64)
  if (g_lane == Lane::avx2) return pair_win_counts_avx2(a, b);
#endif
  return pair_win_counts_scalar(a, b);
}

std::uint64_t discordant_pairs(std::span<const std::int32_t> r1, std::span<const std::int32_t> r2) {
#if defined(__x86_64__) || defined(_M_X64)
  if (g_lane == Lane::avx2) return discordant_pairs_avx2(r1, r2);
#endif
  return discordant_pairs_scalar(r1, r2);
}

}  // namespace stanceval::kernels
