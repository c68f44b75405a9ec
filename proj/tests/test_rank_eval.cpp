#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "stanceval/errors.hpp"
#include "stanceval/rank_eval.hpp"
#include "stanceval/rng.hpp"

using namespace stanceval;

namespace {

Ranking make_ranking(const std::vector<int>& ranks) {
  Ranking r;
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "i%03zu", i);
    r.ids.push_back(buf);
    r.rank[buf] = ranks[i];
  }
  std::sort(r.ids.begin(), r.ids.end());
  return r;
}

Ranking identity_ranking(std::size_t n) {
  std::vector<int> ranks(n);
  for (std::size_t i = 0; i < n; ++i) ranks[i] = static_cast<int>(i + 1);
  return make_ranking(ranks);
}

Ranking reversed_ranking(std::size_t n) {
  std::vector<int> ranks(n);
  for (std::size_t i = 0; i < n; ++i) ranks[i] = static_cast<int>(n - i);
  return make_ranking(ranks);
}

Ranking random_ranking(std::size_t n, Rng& rng) {
  std::vector<int> ranks(n);
  for (std::size_t i = 0; i < n; ++i) ranks[i] = static_cast<int>(i + 1);
  for (std::size_t i = n; i > 1; --i) std::swap(ranks[i - 1], ranks[rng.below(i)]);
  return make_ranking(ranks);
}

}  // namespace

TEST_CASE("footrule similarity: identity, reversal, symmetry") {
  const auto id100 = identity_ranking(100);
  const auto rev100 = reversed_ranking(100);
  CHECK(footrule_similarity(id100, id100) == 1.0);
  CHECK(footrule_similarity(id100, rev100) == 0.0);
  CHECK(footrule_similarity(rev100, id100) == 0.0);

  // Odd n: reversal still attains the floor(n^2/2) bound.
  const auto id7 = identity_ranking(7);
  const auto rev7 = reversed_ranking(7);
  CHECK(footrule_similarity(id7, rev7) == 0.0);

  Rng rng(113, "re-footrule");
  const auto a = random_ranking(50, rng);
  const auto b = random_ranking(50, rng);
  CHECK(footrule_similarity(a, b) == footrule_similarity(b, a));
}

TEST_CASE("kendall similarity: identity, reversal, permutation invariance") {
  const auto id = identity_ranking(60);
  const auto rev = reversed_ranking(60);
  CHECK(kendall_similarity(id, id) == 1.0);
  CHECK(kendall_similarity(id, rev) == 0.0);

  Rng rng(127, "re-kendall");
  const auto a = random_ranking(40, rng);
  const auto b = random_ranking(40, rng);
  CHECK(kendall_similarity(a, b) == kendall_similarity(b, a));

  // Relabeling items consistently in both rankings leaves tau unchanged.
  std::vector<std::size_t> perm(40);
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
  std::vector<int> pa(40), pb(40);
  for (std::size_t i = 0; i < 40; ++i) {
    const std::string& source = a.ids[perm[i]];
    pa[i] = a.rank.at(source);
    pb[i] = b.rank.at(source);
  }
  CHECK(kendall_similarity(make_ranking(pa), make_ranking(pb)) ==
        doctest::Approx(kendall_similarity(a, b)).epsilon(1e-15));
}

TEST_CASE("rank similarities are 1 iff identical and 0 for exact reversal") {
  Rng rng(131, "re-iff");
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_ranking(30, rng);
    auto b = random_ranking(30, rng);
    const bool identical = a.rank == b.rank;
    CHECK((footrule_similarity(a, b) == 1.0) == identical);
    CHECK((kendall_similarity(a, b) == 1.0) == identical);
    // Build the exact reversal of a.
    Ranking rev;
    rev.ids = a.ids;
    for (const auto& [id, r] : a.rank) rev.rank[id] = 31 - r;
    CHECK(footrule_similarity(a, rev) == 0.0);
    CHECK(kendall_similarity(a, rev) == 0.0);
  }
}

TEST_CASE("ordinal alpha over rankings: identity and reversal") {
  const auto id = identity_ranking(100);
  const auto rev = reversed_ranking(100);
  const auto perfect = ordinal_alpha_rankings(id, id);
  REQUIRE(perfect.defined);
  CHECK(perfect.value == 1.0);
  const auto worst = ordinal_alpha_rankings(id, rev);
  REQUIRE(worst.defined);
  CHECK(worst.value == doctest::Approx(-0.99).epsilon(1e-12));
  CHECK(std::abs(worst.value - (-1.0)) <= 0.01 + 1e-12);

  const auto sym = ordinal_alpha_rankings(rev, id);
  CHECK(sym.value == doctest::Approx(worst.value).epsilon(1e-15));
}

TEST_CASE("mismatched item sets are rejected") {
  const auto a = identity_ranking(5);
  const auto b = identity_ranking(6);
  CHECK_THROWS_AS(footrule_similarity(a, b), ValidationError);
  CHECK_THROWS_AS(kendall_similarity(a, b), ValidationError);
  CHECK_THROWS_AS(ordinal_alpha_rankings(a, b), ValidationError);
}

TEST_CASE("pairwise macro F1: identity, complement, and the tie rule") {
  Rng rng(137, "re-f1");
  std::map<PairKey, double> human;
  std::vector<PairKey> subset;
  for (int k = 0; k < 120; ++k) {
    const PairKey key{"a" + std::to_string(k), "b" + std::to_string(k)};
    human[key] = k % 2 == 0 ? 0.8 : 0.2;  // balanced win/loss labels
    subset.push_back(key);
  }
  CHECK(pairwise_macro_f1(human, human, subset) == 1.0);

  std::map<PairKey, double> complement;
  for (const auto& [key, w] : human) complement[key] = 1.0 - w;
  CHECK(pairwise_macro_f1(complement, human, subset) == 0.0);

  // Constant 0.5 predictor with tie-to-loss: loss F1 = 2/3, win F1 = 0.
  std::map<PairKey, double> indifferent;
  for (const auto& [key, w] : human) indifferent[key] = 0.5;
  CHECK(pairwise_macro_f1(indifferent, human, subset) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  // Randomized tie mode sits near 0.5 in expectation.
  double total = 0.0;
  for (int rep = 0; rep < 50; ++rep)
    total += pairwise_macro_f1(indifferent, human, subset, TieMode::randomized, 1000 + rep);
  CHECK(std::abs(total / 50.0 - 0.5) < 0.05);

  // Ground-truth ties are excluded; a subset of only ties cannot be scored.
  std::map<PairKey, double> tied{{{"x", "y"}, 0.5}};
  CHECK_THROWS_AS(pairwise_macro_f1(tied, tied, {{"x", "y"}}), ValidationError);
}

namespace {

// Small synthetic study shared by the evaluate_scorers cases: 6 items with
// a strict latent right-ness order (a permutation of the id order, so the
// canonical pair labels mix wins and losses), one aligned scorer and one
// inverted scorer.
EvalInputs build_eval_inputs() {
  EvalInputs inputs;
  const std::vector<std::string> items{"i0", "i1", "i2", "i3", "i4", "i5"};
  const std::map<std::string, int> strength{{"i0", 2}, {"i1", 5}, {"i2", 0},
                                            {"i3", 4}, {"i4", 1}, {"i5", 3}};

  std::map<std::string, std::vector<int>> aligned, inverted;
  for (const auto& id : items) {
    const int s = strength.at(id);
    aligned[id] = {2 * s + 1, 2 * s + 1, 2 * s + 2};
    inverted[id] = {11 - 2 * s, 11 - 2 * s, 12 - 2 * s};
  }
  inputs.scorers.emplace("aligned", model_win_matrix(aligned, items));
  inputs.scorers.emplace("inverted", model_win_matrix(inverted, items));
  inputs.model_confidence_scorer = "aligned";

  // Unanimous annotations per pair: 3 right-framed and 3 left-framed votes,
  // all following the latent order.
  std::vector<PairwiseAnnotation> annotations;
  int next = 0;
  for (int i = 0; i < 6; ++i) {
    for (int j = i + 1; j < 6; ++j) {
      const bool first_is_righter = strength.at(items[i]) > strength.at(items[j]);
      for (int k = 0; k < 3; ++k) {
        annotations.push_back({"hr" + std::to_string(next), items[i], items[j], Framing::right,
                               first_is_righter ? PairChoice::first : PairChoice::second});
        annotations.push_back({"hl" + std::to_string(next), items[i], items[j], Framing::left,
                               first_is_righter ? PairChoice::second : PairChoice::first});
        ++next;
      }
    }
  }

  inputs.human_left = human_win_matrix(annotations, FramingFilter::left_only, items);
  inputs.human_right = human_win_matrix(annotations, FramingFilter::right_only, items);
  inputs.human_agg = human_win_matrix(annotations, FramingFilter::both, items);

  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j)
      inputs.pairs.pairs.push_back({items[i], items[j], {1, 1}});
  inputs.bt = BtSettings{0.01, 1e-9, 200};
  return inputs;
}

}  // namespace

TEST_CASE("evaluate_scorers: reference rows and baselines") {
  const auto inputs = build_eval_inputs();
  const auto report = evaluate_scorers(inputs);

  // Human aggregate against itself is perfect.
  const auto& agg_p = report.cells.at(kHumanAggRow).at("P");
  CHECK(agg_p.footrule == 1.0);
  CHECK(agg_p.tau == 1.0);
  CHECK(agg_p.alpha_o == 1.0);
  CHECK(agg_p.macro_f1 == 1.0);

  // Framed tasks are unanimous mirrors of the aggregate here.
  CHECK(report.cells.at(kHumanLeftRow).at("P").footrule == 1.0);
  CHECK(report.cells.at(kHumanRightRow).at("P").tau == 1.0);

  // Worst-case row: exact zeros; the ordinal floor for two reversed
  // rankings of n items is -(n-1)/n.
  const auto& worst_p = report.cells.at(kWorstCaseBaselineRow).at("P");
  CHECK(worst_p.footrule == 0.0);
  CHECK(worst_p.tau == 0.0);
  CHECK(worst_p.macro_f1 == 0.0);
  REQUIRE(worst_p.alpha_o.has_value());
  CHECK(*worst_p.alpha_o == doctest::Approx(-(6.0 - 1.0) / 6.0).epsilon(1e-9));

  // Aligned scorer recovers the human order exactly; inverted reverses it.
  const auto& aligned_p = report.cells.at("aligned").at("P");
  CHECK(*aligned_p.footrule == 1.0);
  CHECK(*aligned_p.tau == 1.0);
  CHECK(*aligned_p.macro_f1 == 1.0);
  const auto& inverted_p = report.cells.at("inverted").at("P");
  CHECK(*inverted_p.footrule == 0.0);
  CHECK(*inverted_p.tau == 0.0);
  CHECK(*inverted_p.macro_f1 == 0.0);

  // Unanimous data: every pair is confident on both sides, so P11 holds all
  // pairs and the other subsets are empty with null cells.
  const auto& part = report.partition;
  CHECK(part.p11.size() == inputs.pairs.pairs.size());
  CHECK(part.p11.size() + part.p10.size() + part.p01.size() + part.p00.size() ==
        inputs.pairs.pairs.size());
  const auto& empty_cell = report.cells.at(kHumanAggRow).at("P00");
  CHECK_FALSE(empty_cell.footrule.has_value());
  CHECK_FALSE(empty_cell.macro_f1.has_value());
  CHECK(empty_cell.n_pairs == 0);

  // P11 equals P here, so the refit-on-subset path reproduces the P cells.
  const auto& aligned_p11 = report.cells.at("aligned").at("P11");
  CHECK(aligned_p11.footrule == aligned_p.footrule);
  CHECK(aligned_p11.tau == aligned_p.tau);

  // Random baseline ranks by id order; its macro F1 follows the tie rule.
  const auto& random_p = report.cells.at(kRandomBaselineRow).at("P");
  CHECK(random_p.footrule.has_value());
  CHECK(random_p.macro_f1.has_value());
}

TEST_CASE("evaluate_scorers: deterministic across repeated runs") {
  const auto inputs = build_eval_inputs();
  const auto a = evaluate_scorers(inputs);
  const auto b = evaluate_scorers(inputs);
  REQUIRE(a.row_order == b.row_order);
  for (const auto& row : a.row_order) {
    for (const auto& subset : a.subset_order) {
      const auto& ca = a.cells.at(row).at(subset);
      const auto& cb = b.cells.at(row).at(subset);
      CHECK(ca.footrule == cb.footrule);
      CHECK(ca.tau == cb.tau);
      CHECK(ca.alpha_o == cb.alpha_o);
      CHECK(ca.macro_f1 == cb.macro_f1);
      CHECK(ca.n_pairs == cb.n_pairs);
    }
  }
}
