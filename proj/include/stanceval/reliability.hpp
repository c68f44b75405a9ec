#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "stanceval/types.hpp"

namespace stanceval {

enum class Level { nominal, ordinal };

// Rater-by-unit grid with missing cells. Categories are integer codes; for
// the ordinal metric the codes themselves define the order (the module never
// invents an ordering). Nominal data with string categories can be mapped
// through from_long().
class ReliabilityGrid {
 public:
  explicit ReliabilityGrid(Level level) : level_(level) {}

  void set(const std::string& unit, const std::string& rater, std::int64_t category);

  // Long-format construction: one (unit, rater, value) triple per entry.
  // Nominal string values are assigned codes in sorted order; ordinal values
  // must parse as integers.
  static ReliabilityGrid from_long(
      const std::vector<std::tuple<std::string, std::string, std::string>>& entries, Level level);

  Level level() const { return level_; }
  std::size_t unit_count() const { return cells_.size(); }
  std::size_t rater_count() const { return raters_.size(); }

  // Values per unit (units with one filled cell contribute nothing to alpha).
  const std::map<std::string, std::map<std::string, std::int64_t>>& cells() const { return cells_; }

 private:
  Level level_;
  std::map<std::string, std::map<std::string, std::int64_t>> cells_;  // unit -> rater -> category
  std::map<std::string, bool> raters_;
};

// Alpha is undefined when the data carry no expected disagreement (all
// pairable values identical); that outcome is distinct from any numeric
// value so downstream tables can report it explicitly.
struct AlphaResult {
  bool defined = false;
  double value = 0.0;
  std::size_t n_pairable_units = 0;
  std::size_t n_raters = 0;
  std::size_t n_pairable_values = 0;
};

// Chance-corrected agreement via the coincidence-matrix formulation.
// Requires >= 2 units with >= 2 filled cells.
AlphaResult krippendorff_alpha(const ReliabilityGrid& grid);

// Majority over an odd number of binary labels; unanimity flags all-equal.
std::pair<PointwiseLabel, bool> majority_label(const std::vector<PointwiseLabel>& labels);

// Nominal alpha over two label maps treated as equal-weight raters, computed
// on their shared unit support.
AlphaResult two_party_alpha(const std::map<std::string, PointwiseLabel>& party_a,
                            const std::map<std::string, PointwiseLabel>& party_b);

}  // namespace stanceval
