#include "stanceval/pair_design.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "stanceval/errors.hpp"
#include "stanceval/rng.hpp"

namespace stanceval {

int PositionBinning::decile_of(double score) {
  if (!(score >= 0.0 && score <= 100.0))
    throw ValidationError("bin_scores: score outside [0,100]: " + std::to_string(score));
  const int d = static_cast<int>(score / 10.0);
  return d > 9 ? 9 : d;  // 100.0 belongs to the closed last decile
}

std::string PairStratum::tag() const {
  if (intra()) return "intra(" + std::to_string(b1) + ")";
  return "inter(" + std::to_string(b1) + "," + std::to_string(b2) + ")";
}

PositionBinning bin_scores(const std::map<std::string, double>& mean_scores) {
  PositionBinning binning;
  std::map<std::string, int> deciles;
  std::set<int> occupied;
  for (const auto& [id, score] : mean_scores) {
    const int d = PositionBinning::decile_of(score);
    deciles[id] = d;
    occupied.insert(d);
  }
  std::map<int, int> relabel;
  int next = 1;
  for (int d : occupied) {
    relabel[d] = next++;
    binning.occupied_deciles.push_back(d);
  }
  binning.k = static_cast<int>(occupied.size());
  for (const auto& [id, d] : deciles) {
    binning.bin[id] = relabel[d];
    binning.ids.push_back(id);
  }
  return binning;
}

namespace {

// Deterministic enumeration of a stratum's candidate pairs in canonical
// (sorted id) order, so sampling is invariant to input item ordering.
std::vector<std::pair<std::size_t, std::size_t>> stratum_candidates(
    const std::vector<std::vector<std::string>>& members, const PairStratum& stratum) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (stratum.intra()) {
    const auto& ids = members[stratum.b1];
    for (std::size_t a = 0; a + 1 < ids.size(); ++a)
      for (std::size_t b = a + 1; b < ids.size(); ++b) out.emplace_back(a, b);
  } else {
    const auto& lhs = members[stratum.b1];
    const auto& rhs = members[stratum.b2];
    for (std::size_t a = 0; a < lhs.size(); ++a)
      for (std::size_t b = 0; b < rhs.size(); ++b) out.emplace_back(a, b);
  }
  return out;
}

}  // namespace

PairSet sample_pairs(const PositionBinning& binning, std::size_t intra_per_bin,
                     std::size_t inter_per_bin_pair, std::uint64_t seed) {
  // Bin membership in sorted-id order (index 1..K used directly).
  std::vector<std::vector<std::string>> members(binning.k + 1);
  for (const auto& [id, b] : binning.bin) members[b].push_back(id);
  for (auto& ids : members) std::sort(ids.begin(), ids.end());

  PairSet result;
  result.seed = seed;

  std::vector<PairStratum> strata;
  for (int b = 1; b <= binning.k; ++b) strata.push_back({b, b});
  for (int b1 = 1; b1 <= binning.k; ++b1)
    for (int b2 = b1 + 1; b2 <= binning.k; ++b2) strata.push_back({b1, b2});

  for (const auto& stratum : strata) {
    const std::size_t quota = stratum.intra() ? intra_per_bin : inter_per_bin_pair;
    if (quota == 0) continue;
    const auto candidates = stratum_candidates(members, stratum);
    const std::size_t take = std::min(quota, candidates.size());
    if (take == 0) continue;
    Rng rng(seed, "pair-stratum:" + stratum.tag());
    for (std::size_t idx : sample_indices(candidates.size(), take, rng)) {
      const auto& [a, b] = candidates[idx];
      std::string lhs = members[stratum.b1][a];
      std::string rhs = stratum.intra() ? members[stratum.b1][b] : members[stratum.b2][b];
      if (rhs < lhs) std::swap(lhs, rhs);
      result.pairs.push_back({std::move(lhs), std::move(rhs), stratum});
    }
  }

  std::sort(result.pairs.begin(), result.pairs.end(), [](const auto& a, const auto& b) {
    return std::tie(a.arg_i, a.arg_j) < std::tie(b.arg_i, b.arg_j);
  });
  return result;
}

bool check_connectivity(const PairSet& pairs, const std::vector<std::string>& items) {
  if (items.empty()) return false;
  if (items.size() == 1) return true;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < items.size(); ++i) index[items[i]] = i;

  // Union-find over item indices.
  std::vector<std::size_t> parent(items.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (const auto& p : pairs.pairs) {
    auto it_i = index.find(p.arg_i);
    auto it_j = index.find(p.arg_j);
    if (it_i == index.end() || it_j == index.end()) continue;
    parent[find(it_i->second)] = find(it_j->second);
  }
  const std::size_t root = find(0);
  for (std::size_t i = 1; i < items.size(); ++i)
    if (find(i) != root) return false;
  return true;
}

SampleSizeCheck check_sample_size(const PairSet& pairs, std::size_t n_items) {
  if (n_items < 2) throw ValidationError("check_sample_size: requires n >= 2");
  SampleSizeCheck check;
  check.n_pairs = pairs.pairs.size();
  check.target = static_cast<double>(n_items) * std::log(static_cast<double>(n_items));
  check.ok = static_cast<double>(check.n_pairs) >= check.target;
  return check;
}

EntropySummary node_entropy(const PairSet& pairs, const PositionBinning& binning) {
  std::map<std::string, std::map<int, std::size_t>> partner_bins;
  for (const auto& p : pairs.pairs) {
    auto bi = binning.bin.find(p.arg_i);
    auto bj = binning.bin.find(p.arg_j);
    if (bi == binning.bin.end() || bj == binning.bin.end())
      throw ValidationError("node_entropy: pair references unbinned item");
    partner_bins[p.arg_i][bj->second] += 1;
    partner_bins[p.arg_j][bi->second] += 1;
  }

  EntropySummary summary;
  std::vector<double> values;
  for (const auto& id : binning.ids) {
    auto it = partner_bins.find(id);
    if (it == partner_bins.end())
      throw ValidationError("node_entropy: item '" + id + "' appears in no pair");
    std::size_t total = 0;
    for (const auto& [b, c] : it->second) total += c;
    double h = 0.0;
    for (const auto& [b, c] : it->second) {
      const double f = static_cast<double>(c) / static_cast<double>(total);
      h -= f * std::log2(f);
    }
    summary.by_item[id] = h;
    values.push_back(h);
  }

  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  summary.median = n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  std::size_t in_band = 0;
  for (double h : values)
    if (h >= 2.2 && h <= 2.8) ++in_band;
  summary.frac_in_band = static_cast<double>(in_band) / static_cast<double>(n);
  return summary;
}

}  // namespace stanceval
