#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stanceval/btrank.hpp"
#include "stanceval/comparisons.hpp"
#include "stanceval/reliability.hpp"

namespace stanceval {

// Total ranking of an item set; rank 1 is the most right-wing item.
struct Ranking {
  std::vector<std::string> ids;        // sorted item set
  std::map<std::string, int> rank;     // id -> 1..n (bijection)
};

Ranking ranking_from_scale(const LatentScale& scale);

// Spearman footrule similarity: 1 - sum|r1 - r2| / floor(n^2 / 2).
double footrule_similarity(const Ranking& r1, const Ranking& r2);

// Kendall similarity: 1 - (#discordant pairs) / (n(n-1)/2).
double kendall_similarity(const Ranking& r1, const Ranking& r2);

// Ordinal Krippendorff alpha over the two rankings as a 2-rater grid of
// rank values.
AlphaResult ordinal_alpha_rankings(const Ranking& r1, const Ranking& r2);

// Tie handling for predicted win shares exactly at 0.5: map them to "loss"
// (deterministic) or break them by seeded coin flips (for comparison with
// chance-level expectations).
enum class TieMode { loss, randomized };

// Macro F1 over pairwise win/loss labels: the human share labels each pair
// (exact 0.5 excluded as a ground-truth tie), the candidate share is
// thresholded at 0.5 the same way. Throws when no pair survives exclusion.
double pairwise_macro_f1(const std::map<PairKey, double>& candidate_share,
                         const std::map<PairKey, double>& human_share,
                         const std::vector<PairKey>& subset, TieMode tie_mode = TieMode::loss,
                         std::uint64_t seed = 0);

struct EvalCell {
  std::optional<double> footrule;
  std::optional<double> tau;
  std::optional<double> alpha_o;   // unset when undefined or subset empty
  bool alpha_defined = false;
  std::optional<double> macro_f1;  // unset when no scorable pair exists
  std::size_t n_pairs = 0;
};

struct EvalInputs {
  std::map<std::string, WinMatrix> scorers;  // dense model/ensemble matrices
  WinMatrix human_left;   // inverted left-framed
  WinMatrix human_right;
  WinMatrix human_agg;
  PairSet pairs;
  std::string model_confidence_scorer;  // scorer whose shares set model confidence
  double margin = 0.25;
  BtSettings bt;
  TieMode tie_mode = TieMode::loss;
  std::uint64_t seed = 0;
};

// Full evaluation table: every scorer plus human framings and the analytic
// baselines, against the human aggregate, over the full pair set and the
// four confidence subsets. Confidence-subset rank metrics refit both sides
// on the subset-restricted comparisons and compare full rankings.
struct EvalReport {
  std::vector<std::string> row_order;
  std::vector<std::string> subset_order;  // "P", "P11", "P10", "P01", "P00"
  std::map<std::string, std::map<std::string, EvalCell>> cells;
  ConfidencePartition partition;
};

EvalReport evaluate_scorers(const EvalInputs& inputs);

inline constexpr const char* kHumanAggRow = "human_agg";
inline constexpr const char* kHumanLeftRow = "human_left";
inline constexpr const char* kHumanRightRow = "human_right";
inline constexpr const char* kRandomBaselineRow = "random_baseline";
inline constexpr const char* kWorstCaseBaselineRow = "worst_case_baseline";

}  // namespace stanceval
