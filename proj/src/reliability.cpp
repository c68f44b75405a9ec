#include "stanceval/reliability.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "stanceval/errors.hpp"
#include "stanceval/rational.hpp"

namespace stanceval {

void ReliabilityGrid::set(const std::string& unit, const std::string& rater, std::int64_t category) {
  cells_[unit][rater] = category;
  raters_[rater] = true;
}

ReliabilityGrid ReliabilityGrid::from_long(
    const std::vector<std::tuple<std::string, std::string, std::string>>& entries, Level level) {
  ReliabilityGrid grid(level);
  if (level == Level::ordinal) {
    for (const auto& [unit, rater, value] : entries) {
      std::int64_t v = 0;
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      if (ec != std::errc{} || ptr != value.data() + value.size())
        throw ValidationError("ordinal grid value is not an integer: '" + value + "'");
      grid.set(unit, rater, v);
    }
    return grid;
  }
  std::set<std::string> tokens;
  for (const auto& e : entries) tokens.insert(std::get<2>(e));
  std::map<std::string, std::int64_t> code;
  std::int64_t next = 0;
  for (const auto& t : tokens) code[t] = next++;
  for (const auto& [unit, rater, value] : entries) grid.set(unit, rater, code[value]);
  return grid;
}

AlphaResult krippendorff_alpha(const ReliabilityGrid& grid) {
  // Coincidence matrix over observed categories: each unit with m >= 2
  // values contributes 1/(m-1) per ordered value pair. Counts accumulate
  // exactly as rationals; distances and the final ratio use long double.
  std::vector<std::vector<std::int64_t>> pairable_units;
  std::set<std::int64_t> category_set;
  for (const auto& [unit, by_rater] : grid.cells()) {
    if (by_rater.size() < 2) continue;
    std::vector<std::int64_t> values;
    values.reserve(by_rater.size());
    for (const auto& [rater, v] : by_rater) values.push_back(v);
    for (std::int64_t v : values) category_set.insert(v);
    pairable_units.push_back(std::move(values));
  }
  if (pairable_units.size() < 2)
    throw ValidationError("krippendorff_alpha: fewer than 2 units with >= 2 ratings");

  std::vector<std::int64_t> categories(category_set.begin(), category_set.end());
  const std::size_t k = categories.size();
  std::map<std::int64_t, std::size_t> index;
  for (std::size_t i = 0; i < k; ++i) index[categories[i]] = i;

  std::vector<std::vector<Rational>> o(k, std::vector<Rational>(k));
  for (const auto& values : pairable_units) {
    const auto m = static_cast<std::int64_t>(values.size());
    for (std::size_t a = 0; a < values.size(); ++a)
      for (std::size_t b = 0; b < values.size(); ++b)
        if (a != b) o[index[values[a]]][index[values[b]]] += Rational(1, m - 1);
  }

  // Marginals n_c are integral: each pairable value contributes exactly one.
  std::vector<std::int64_t> freq(k, 0);
  std::int64_t n_total = 0;
  for (std::size_t c = 0; c < k; ++c) {
    Rational sum;
    for (std::size_t kk = 0; kk < k; ++kk) sum += o[c][kk];
    if (!sum.is_integer())
      throw ComputationError("krippendorff_alpha: non-integral coincidence marginal");
    freq[c] = sum.num();
    n_total += freq[c];
  }

  // Squared distance between category indices c and kk (c <= kk).
  std::vector<std::int64_t> cum(k + 1, 0);
  for (std::size_t i = 0; i < k; ++i) cum[i + 1] = cum[i] + freq[i];
  auto delta_sq = [&](std::size_t c, std::size_t kk) -> long double {
    if (c == kk) return 0.0L;
    if (c > kk) std::swap(c, kk);
    if (grid.level() == Level::nominal) return 1.0L;
    const long double span = static_cast<long double>(cum[kk + 1] - cum[c]);
    const long double d = span - 0.5L * static_cast<long double>(freq[c] + freq[kk]);
    return d * d;
  };

  long double d_obs = 0.0L;   // sum over o_ck * delta^2
  long double d_exp = 0.0L;   // sum over n_c * n_k * delta^2, c != k
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t kk = 0; kk < k; ++kk) {
      if (c == kk) continue;
      const long double d2 = delta_sq(c, kk);
      d_obs += static_cast<long double>(o[c][kk].to_double()) * d2;
      d_exp += static_cast<long double>(freq[c]) * static_cast<long double>(freq[kk]) * d2;
    }
  }

  AlphaResult result;
  result.n_pairable_units = pairable_units.size();
  result.n_raters = grid.rater_count();
  result.n_pairable_values = static_cast<std::size_t>(n_total);
  if (d_exp == 0.0L) {
    result.defined = false;  // no expected disagreement
    return result;
  }
  result.defined = true;
  result.value = static_cast<double>(1.0L - static_cast<long double>(n_total - 1) * d_obs / d_exp);
  return result;
}

std::pair<PointwiseLabel, bool> majority_label(const std::vector<PointwiseLabel>& labels) {
  if (labels.empty() || labels.size() % 2 == 0)
    throw ValidationError("majority_label: requires an odd number of labels, got " +
                          std::to_string(labels.size()));
  std::size_t political = 0;
  for (auto l : labels)
    if (l == PointwiseLabel::political) ++political;
  const std::size_t apolitical = labels.size() - political;
  const PointwiseLabel majority =
      political > apolitical ? PointwiseLabel::political : PointwiseLabel::apolitical;
  const bool unanimous = political == 0 || apolitical == 0;
  return {majority, unanimous};
}

AlphaResult two_party_alpha(const std::map<std::string, PointwiseLabel>& party_a,
                            const std::map<std::string, PointwiseLabel>& party_b) {
  ReliabilityGrid grid(Level::nominal);
  std::size_t shared = 0;
  for (const auto& [unit, label_a] : party_a) {
    auto it = party_b.find(unit);
    if (it == party_b.end()) continue;
    ++shared;
    grid.set(unit, "party_a", label_a == PointwiseLabel::political ? 1 : 0);
    grid.set(unit, "party_b", it->second == PointwiseLabel::political ? 1 : 0);
  }
  if (shared == 0) throw ValidationError("two_party_alpha: no shared unit support");
  return krippendorff_alpha(grid);
}

}  // namespace stanceval
