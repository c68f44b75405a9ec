#include "stanceval/rank_eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "stanceval/errors.hpp"
#include "stanceval/kernels.hpp"
#include "stanceval/rng.hpp"

namespace stanceval {

namespace {

void require_same_items(const Ranking& r1, const Ranking& r2, const char* what) {
  if (r1.ids != r2.ids)
    throw ValidationError(std::string(what) + ": rankings cover different item sets");
  if (r1.ids.size() < 2)
    throw ValidationError(std::string(what) + ": requires at least 2 items");
}

// Rank vectors in the shared canonical id order, for the counting kernels.
std::pair<std::vector<std::int32_t>, std::vector<std::int32_t>> rank_vectors(const Ranking& r1,
                                                                             const Ranking& r2) {
  std::vector<std::int32_t> v1, v2;
  v1.reserve(r1.ids.size());
  v2.reserve(r1.ids.size());
  for (const auto& id : r1.ids) {
    v1.push_back(r1.rank.at(id));
    v2.push_back(r2.rank.at(id));
  }
  return {std::move(v1), std::move(v2)};
}

}  // namespace

Ranking ranking_from_scale(const LatentScale& scale) {
  Ranking r;
  r.ids = scale.ids;
  std::sort(r.ids.begin(), r.ids.end());
  int next = 1;
  for (const auto& id : scale.ranking) r.rank[id] = next++;
  return r;
}

double footrule_similarity(const Ranking& r1, const Ranking& r2) {
  require_same_items(r1, r2, "footrule_similarity");
  const std::size_t n = r1.ids.size();
  std::uint64_t displacement = 0;
  for (const auto& id : r1.ids)
    displacement += static_cast<std::uint64_t>(std::abs(r1.rank.at(id) - r2.rank.at(id)));
  const std::uint64_t max_displacement = (n * n) / 2;
  return 1.0 - static_cast<double>(displacement) / static_cast<double>(max_displacement);
}

double kendall_similarity(const Ranking& r1, const Ranking& r2) {
  require_same_items(r1, r2, "kendall_similarity");
  const auto [v1, v2] = rank_vectors(r1, r2);
  const std::uint64_t discordant = kernels::discordant_pairs(v1, v2);
  const std::uint64_t total = v1.size() * (v1.size() - 1) / 2;
  return 1.0 - static_cast<double>(discordant) / static_cast<double>(total);
}

AlphaResult ordinal_alpha_rankings(const Ranking& r1, const Ranking& r2) {
  require_same_items(r1, r2, "ordinal_alpha_rankings");
  ReliabilityGrid grid(Level::ordinal);
  for (const auto& id : r1.ids) {
    grid.set(id, "r1", r1.rank.at(id));
    grid.set(id, "r2", r2.rank.at(id));
  }
  return krippendorff_alpha(grid);
}

double pairwise_macro_f1(const std::map<PairKey, double>& candidate_share,
                         const std::map<PairKey, double>& human_share,
                         const std::vector<PairKey>& subset, TieMode tie_mode, std::uint64_t seed) {
  Rng rng(seed, "macro-f1-ties");
  long counts[2][2] = {{0, 0}, {0, 0}};  // [truth win?][pred win?]
  std::size_t scored = 0;
  for (const auto& key : subset) {
    auto h = human_share.find(key);
    auto c = candidate_share.find(key);
    if (h == human_share.end() || c == candidate_share.end())
      throw ValidationError("pairwise_macro_f1: pair (" + key.first + ", " + key.second +
                            ") missing a normalized share");
    if (h->second == 0.5) continue;  // ground-truth tie: excluded from scoring
    const bool truth_win = h->second > 0.5;
    bool pred_win;
    if (c->second > 0.5)
      pred_win = true;
    else if (c->second < 0.5)
      pred_win = false;
    else
      pred_win = tie_mode == TieMode::randomized ? (rng.next() & 1u) != 0 : false;
    ++counts[truth_win ? 1 : 0][pred_win ? 1 : 0];
    ++scored;
  }
  if (scored == 0)
    throw ValidationError("pairwise_macro_f1: no scorable pairs (all ground-truth ties)");

  auto f1_for = [&](bool positive_is_win) {
    const long tp = positive_is_win ? counts[1][1] : counts[0][0];
    const long fp = positive_is_win ? counts[0][1] : counts[1][0];
    const long fn = positive_is_win ? counts[1][0] : counts[0][1];
    const long denom = 2 * tp + fp + fn;
    return denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
  };
  // Average over the classes the truth labels actually contain, so a scorer
  // matching one-sided ground truth still scores 1.
  const bool has_win = counts[1][0] + counts[1][1] > 0;
  const bool has_loss = counts[0][0] + counts[0][1] > 0;
  double sum = 0.0;
  int classes = 0;
  if (has_win) {
    sum += f1_for(true);
    ++classes;
  }
  if (has_loss) {
    sum += f1_for(false);
    ++classes;
  }
  return sum / static_cast<double>(classes);
}

namespace {

std::map<PairKey, double> shares_on(const WinMatrix& wm, const std::vector<PairKey>& pairs) {
  std::map<PairKey, double> out;
  for (const auto& key : pairs)
    out[key] = normalized_value(wm, wm.index_of(key.first), wm.index_of(key.second));
  return out;
}

}  // namespace

EvalReport evaluate_scorers(const EvalInputs& inputs) {
  auto conf_it = inputs.scorers.find(inputs.model_confidence_scorer);
  if (conf_it == inputs.scorers.end())
    throw ValidationError("evaluate_scorers: model confidence scorer '" +
                          inputs.model_confidence_scorer + "' has no win matrix");

  EvalReport report;
  report.partition =
      confidence_partition(conf_it->second, inputs.human_agg, inputs.pairs, inputs.margin);

  std::vector<PairKey> all_pairs;
  for (const auto& p : inputs.pairs.pairs) all_pairs.emplace_back(p.arg_i, p.arg_j);

  report.subset_order = {"P", "P11", "P10", "P01", "P00"};
  const std::map<std::string, const std::vector<PairKey>*> subsets = {
      {"P", &all_pairs},
      {"P11", &report.partition.p11},
      {"P10", &report.partition.p10},
      {"P01", &report.partition.p01},
      {"P00", &report.partition.p00}};

  report.row_order = {kHumanAggRow, kHumanLeftRow, kHumanRightRow};
  for (const auto& [id, wm] : inputs.scorers) report.row_order.push_back(id);
  report.row_order.push_back(kRandomBaselineRow);
  report.row_order.push_back(kWorstCaseBaselineRow);

  for (const auto& subset_name : report.subset_order) {
    const std::vector<PairKey>& subset = *subsets.at(subset_name);
    if (subset.empty()) {
      for (const auto& row : report.row_order) report.cells[row][subset_name] = EvalCell{};
      continue;
    }
    const bool full = subset_name == "P";

    // Human side for this subset: refit on the restricted comparisons.
    const WinMatrix human_restricted = full ? inputs.human_agg : inputs.human_agg.restricted_to(subset);
    const LatentScale human_scale = fit_bt_ilsr(human_restricted, inputs.bt);
    const Ranking human_ranking = ranking_from_scale(human_scale);
    const auto human_shares = shares_on(inputs.human_agg, subset);

    auto evaluate_row = [&](const LatentScale& scale,
                            const std::map<PairKey, double>& candidate_shares) {
      EvalCell cell;
      cell.n_pairs = subset.size();
      const Ranking ranking = ranking_from_scale(scale);
      cell.footrule = footrule_similarity(ranking, human_ranking);
      cell.tau = kendall_similarity(ranking, human_ranking);
      const AlphaResult alpha = ordinal_alpha_rankings(ranking, human_ranking);
      cell.alpha_defined = alpha.defined;
      if (alpha.defined) cell.alpha_o = alpha.value;
      try {
        cell.macro_f1 = pairwise_macro_f1(candidate_shares, human_shares, subset,
                                          inputs.tie_mode, inputs.seed);
      } catch (const ValidationError&) {
        cell.macro_f1.reset();  // all ground-truth ties in this subset
      }
      return cell;
    };

    report.cells[kHumanAggRow][subset_name] = evaluate_row(human_scale, human_shares);

    const std::pair<const char*, const WinMatrix*> framed[] = {{kHumanLeftRow, &inputs.human_left},
                                                               {kHumanRightRow, &inputs.human_right}};
    for (const auto& [row, matrix] : framed) {
      const WinMatrix restricted = full ? *matrix : matrix->restricted_to(subset);
      const LatentScale scale = fit_bt_ilsr(restricted, inputs.bt);
      report.cells[row][subset_name] = evaluate_row(scale, shares_on(*matrix, subset));
    }

    for (const auto& [id, wm] : inputs.scorers) {
      const WinMatrix restricted = full ? wm : wm.restricted_to(subset);
      const LatentScale scale = fit_bt_ilsr(restricted, inputs.bt);
      report.cells[id][subset_name] = evaluate_row(scale, shares_on(wm, subset));
    }

    {
      std::map<PairKey, double> uniform;
      for (const auto& key : subset) uniform[key] = 0.5;
      report.cells[kRandomBaselineRow][subset_name] =
          evaluate_row(random_baseline(inputs.human_agg.ids()), uniform);
    }
    {
      std::map<PairKey, double> inverted;
      for (const auto& [key, share] : human_shares) inverted[key] = 1.0 - share;
      report.cells[kWorstCaseBaselineRow][subset_name] =
          evaluate_row(worst_case_baseline(human_scale), inverted);
    }
  }
  return report;
}

}  // namespace stanceval
