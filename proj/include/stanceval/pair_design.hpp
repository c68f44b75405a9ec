#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace stanceval {

// Decile discretization of position scores over [0,100]: bins are
// left-closed right-open except the last ([90,100] closed). Empty deciles
// are dropped and the occupied ones relabeled 1..K preserving order.
struct PositionBinning {
  int k = 0;                                  // number of occupied bins
  std::map<std::string, int> bin;             // argument_id -> 1..K
  std::vector<int> occupied_deciles;          // decile index 0..9 per bin, ascending
  std::vector<std::string> ids;               // binned items, sorted

  // Raw decile index (0..9) for a score; throws outside [0,100].
  static int decile_of(double score);
};

PositionBinning bin_scores(const std::map<std::string, double>& mean_scores);

// One sampled comparison pair. Ids are stored canonically (arg_i < arg_j);
// a stratum is either intra-bin (b1 == b2) or an unordered bin pair.
struct PairStratum {
  int b1 = 0;
  int b2 = 0;  // b1 <= b2
  bool intra() const { return b1 == b2; }
  std::string tag() const;
};

struct SampledPair {
  std::string arg_i;
  std::string arg_j;
  PairStratum stratum;
};

struct PairSet {
  std::vector<SampledPair> pairs;  // canonical order, no duplicates
  std::uint64_t seed = 0;
};

// Uniform sample without replacement within each stratum: `intra_per_bin`
// pairs from every occupied bin and `inter_per_bin_pair` from every
// unordered bin pair. Strata with fewer available pairs than requested
// contribute all of them. Deterministic under (seed); invariant to input
// item order.
PairSet sample_pairs(const PositionBinning& binning, std::size_t intra_per_bin,
                     std::size_t inter_per_bin_pair, std::uint64_t seed);

// True iff the undirected comparison graph over `items` is one component.
bool check_connectivity(const PairSet& pairs, const std::vector<std::string>& items);

struct SampleSizeCheck {
  bool ok = false;
  double target = 0.0;  // n * ln(n)
  std::size_t n_pairs = 0;
};

SampleSizeCheck check_sample_size(const PairSet& pairs, std::size_t n_items);

// Shannon entropy of each item's comparison distribution over partner bins,
// with 0 * log 0 := 0. Every binned item must appear in at least one pair.
struct EntropySummary {
  std::map<std::string, double> by_item;
  double median = 0.0;
  double frac_in_band = 0.0;  // share of items with H in [2.2, 2.8]
};

EntropySummary node_entropy(const PairSet& pairs, const PositionBinning& binning);

}  // namespace stanceval
