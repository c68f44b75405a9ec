#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stanceval/pair_design.hpp"
#include "stanceval/types.hpp"

namespace stanceval {

// Hollow win-mass matrix. Entry (i,j) carries the win mass of i over j;
// draws contribute 0.5 to both directions, so W_ij + W_ji equals the
// comparison mass M_ij exactly.
class WinMatrix {
 public:
  WinMatrix() = default;
  explicit WinMatrix(std::vector<std::string> ids);

  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }
  std::size_t index_of(const std::string& id) const;  // throws on unknown id

  double win_mass(std::size_t i, std::size_t j) const { return w_[i * size() + j]; }
  double pair_mass(std::size_t i, std::size_t j) const {
    return w_[i * size() + j] + w_[j * size() + i];
  }

  void add_win(std::size_t i, std::size_t j, double mass);
  void add_draw(std::size_t i, std::size_t j);  // 0.5 to both directions

  // Entrywise sum; both matrices must share the same id order.
  friend WinMatrix aggregate(const WinMatrix& a, const WinMatrix& b);

  // Copy keeping only entries for the given unordered pairs (others zeroed).
  WinMatrix restricted_to(const std::vector<std::pair<std::string, std::string>>& pairs) const;

 private:
  std::vector<std::string> ids_;
  std::map<std::string, std::size_t> index_;
  std::vector<double> w_;
};

// Comparison outcome for two binned scores: 1 win, 0.5 draw, 0 loss.
double win_value(int x_bin, int y_bin);

// NA repetitions are marked with kNaBin and are excluded from both win mass
// and comparison mass.
inline constexpr int kNaBin = -1;

// Dense win matrix over all unordered item pairs from per-repetition binned
// scores: W_ij sums win outcomes over every combination of i's and j's
// non-NA repetitions. Every item needs at least one non-NA repetition.
WinMatrix model_win_matrix(const std::map<std::string, std::vector<int>>& binned_reps,
                           const std::vector<std::string>& items);

enum class FramingFilter { left_only, right_only, both };

// Sparse win matrix from framed pairwise annotations. Wins point toward
// "more right-wing": right-framed choices count directly, left-framed
// matrices are built the same way and transposed before use, and `both`
// returns the aggregate of the two.
WinMatrix human_win_matrix(std::span<const PairwiseAnnotation> annotations, FramingFilter filter,
                           const std::vector<std::string>& items);

// Normalized win share W_ij / M_ij in [0,1]; throws when the pair has no
// comparison mass.
double normalized_value(const WinMatrix& wm, std::size_t i, std::size_t j);

struct ConfidenceFlags {
  bool model_confident = false;
  bool human_confident = false;
};

using PairKey = std::pair<std::string, std::string>;  // canonical: first < second

// Pair subsets by two-party confidence: confident iff |What - 0.5| >= margin
// (boundary inclusive). Subscripts are (model, human); the four subsets
// partition the pair set exactly.
struct ConfidencePartition {
  std::map<PairKey, ConfidenceFlags> flags;
  std::vector<PairKey> p11, p10, p01, p00;

  const std::vector<PairKey>& subset(bool model_confident, bool human_confident) const;
};

ConfidencePartition confidence_partition(const WinMatrix& model, const WinMatrix& human,
                                         const PairSet& pairs, double margin = 0.25);

}  // namespace stanceval
