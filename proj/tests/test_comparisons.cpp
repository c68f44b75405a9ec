#include "doctest.h"

#include "oracles.hpp"
#include "stanceval/comparisons.hpp"
#include "stanceval/errors.hpp"
#include "stanceval/rng.hpp"

using namespace stanceval;

TEST_CASE("win function truth table") {
  CHECK(win_value(5, 3) == 1.0);
  CHECK(win_value(3, 3) == 0.5);
  CHECK(win_value(2, 4) == 0.0);
}

TEST_CASE("model win matrix: worked two-item example") {
  // reps bins {[3,3],[2,4]}: combos (3,2)=1,(3,4)=0,(3,2)=1,(3,4)=0.
  std::map<std::string, std::vector<int>> reps{{"i", {3, 3}}, {"j", {2, 4}}};
  const auto wm = model_win_matrix(reps, {"i", "j"});
  const auto i = wm.index_of("i");
  const auto j = wm.index_of("j");
  CHECK(wm.win_mass(i, j) == 2.0);
  CHECK(wm.win_mass(j, i) == 2.0);
  CHECK(wm.pair_mass(i, j) == 4.0);
  CHECK(wm.win_mass(i, i) == 0.0);
}

TEST_CASE("model win matrix: all draws and total dominance") {
  std::map<std::string, std::vector<int>> draws{{"i", {4, 4, 4}}, {"j", {4, 4, 4}}};
  const auto wm = model_win_matrix(draws, {"i", "j"});
  CHECK(wm.win_mass(0, 1) == wm.win_mass(1, 0));
  CHECK(wm.win_mass(0, 1) == wm.pair_mass(0, 1) / 2.0);

  std::map<std::string, std::vector<int>> dominated{{"i", {7, 8}}, {"j", {2, 3}}};
  const auto wd = model_win_matrix(dominated, {"i", "j"});
  const auto i = wd.index_of("i");
  const auto j = wd.index_of("j");
  CHECK(wd.win_mass(i, j) == wd.pair_mass(i, j));
  CHECK(wd.win_mass(j, i) == 0.0);
}

TEST_CASE("model win matrix: NA repetitions drop out of mass; all-NA item is an error") {
  std::map<std::string, std::vector<int>> reps{{"i", {3, kNaBin, 5}}, {"j", {4, 4, kNaBin}}};
  const auto wm = model_win_matrix(reps, {"i", "j"});
  CHECK(wm.pair_mass(0, 1) == 4.0);  // 2 valid x 2 valid

  std::map<std::string, std::vector<int>> bad{{"i", {kNaBin, kNaBin}}, {"j", {4}}};
  CHECK_THROWS_WITH_AS(model_win_matrix(bad, {"i", "j"}), doctest::Contains("'i'"),
                       ValidationError);
}

TEST_CASE("model win matrix equals exhaustive enumeration on random instances") {
  Rng rng(71, "cmp-oracle");
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n_items = 2 + rng.below(4);
    std::vector<std::string> items;
    std::map<std::string, std::vector<int>> reps;
    for (std::size_t i = 0; i < n_items; ++i) {
      const std::string id = "x" + std::to_string(i);
      items.push_back(id);
      const std::size_t n_reps = 1 + rng.below(5);
      std::vector<int> r;
      for (std::size_t k = 0; k < n_reps; ++k)
        r.push_back(rng.below(4) == 0 ? kNaBin : static_cast<int>(1 + rng.below(8)));
      if (std::all_of(r.begin(), r.end(), [](int v) { return v == kNaBin; }))
        r[0] = static_cast<int>(1 + rng.below(8));
      reps[id] = r;
    }
    const auto wm = model_win_matrix(reps, items);
    for (std::size_t i = 0; i < n_items; ++i) {
      CHECK(wm.win_mass(i, i) == 0.0);
      for (std::size_t j = i + 1; j < n_items; ++j) {
        const auto expected = oracle::win_mass(reps[items[i]], reps[items[j]]);
        CHECK(wm.win_mass(i, j) == expected.w_ab);
        CHECK(wm.win_mass(j, i) == expected.w_ba);
        CHECK(wm.pair_mass(i, j) == expected.mass);
      }
    }
  }
}

TEST_CASE("human win matrix: framing semantics") {
  const std::vector<std::string> items{"i", "j"};
  std::vector<PairwiseAnnotation> annotations{
      {"h1", "i", "j", Framing::right, PairChoice::first}};
  const auto right = human_win_matrix(annotations, FramingFilter::right_only, items);
  CHECK(right.win_mass(right.index_of("i"), right.index_of("j")) == 1.0);
  CHECK(right.win_mass(right.index_of("j"), right.index_of("i")) == 0.0);

  annotations[0].framing = Framing::left;
  const auto left = human_win_matrix(annotations, FramingFilter::left_only, items);
  CHECK(left.win_mass(left.index_of("j"), left.index_of("i")) == 1.0);
  CHECK(left.win_mass(left.index_of("i"), left.index_of("j")) == 0.0);
}

TEST_CASE("human win matrix: 5 wins + 1 equal normalizes to 11/12") {
  const std::vector<std::string> items{"i", "j"};
  std::vector<PairwiseAnnotation> annotations;
  for (int k = 0; k < 3; ++k)
    annotations.push_back({"r" + std::to_string(k), "i", "j", Framing::right, PairChoice::first});
  for (int k = 0; k < 2; ++k)
    annotations.push_back({"l" + std::to_string(k), "i", "j", Framing::left, PairChoice::second});
  annotations.push_back({"l2", "i", "j", Framing::left, PairChoice::equal});

  const auto wm = human_win_matrix(annotations, FramingFilter::both, items);
  const auto i = wm.index_of("i");
  const auto j = wm.index_of("j");
  CHECK(wm.win_mass(i, j) == 5.5);
  CHECK(wm.win_mass(j, i) == 0.5);
  CHECK(wm.pair_mass(i, j) == 6.0);
  CHECK(normalized_value(wm, i, j) == doctest::Approx(11.0 / 12.0).epsilon(1e-15));

  std::vector<PairwiseAnnotation> unknown{{"h", "i", "ghost", Framing::right, PairChoice::first}};
  CHECK_THROWS_AS(human_win_matrix(unknown, FramingFilter::both, items), ValidationError);
}

TEST_CASE("normalized values: complements, draws, and undefined mass") {
  const std::vector<std::string> items{"i", "j", "k"};
  std::vector<PairwiseAnnotation> annotations{
      {"a", "i", "j", Framing::right, PairChoice::first},
      {"b", "i", "j", Framing::right, PairChoice::first},
      {"c", "i", "j", Framing::right, PairChoice::first},
      {"d", "i", "j", Framing::right, PairChoice::second},
      {"e", "j", "k", Framing::right, PairChoice::equal}};
  const auto wm = human_win_matrix(annotations, FramingFilter::right_only, items);
  const auto i = wm.index_of("i");
  const auto j = wm.index_of("j");
  const auto k = wm.index_of("k");
  CHECK(normalized_value(wm, i, j) == 0.75);
  CHECK(normalized_value(wm, i, j) + normalized_value(wm, j, i) == 1.0);
  CHECK(normalized_value(wm, j, k) == 0.5);
  CHECK_THROWS_AS(normalized_value(wm, i, k), ComputationError);
}

TEST_CASE("hollowness and mass identity hold after aggregation") {
  Rng rng(83, "cmp-hollow");
  const std::vector<std::string> items{"a", "b", "c", "d"};
  std::vector<PairwiseAnnotation> annotations;
  for (int k = 0; k < 60; ++k) {
    auto pick = [&] { return items[rng.below(items.size())]; };
    std::string x = pick(), y = pick();
    if (x == y) continue;
    const Framing f = rng.below(2) ? Framing::left : Framing::right;
    const PairChoice c = static_cast<PairChoice>(rng.below(3));
    annotations.push_back({"h" + std::to_string(k), x, y, f, c});
  }
  const auto left = human_win_matrix(annotations, FramingFilter::left_only, items);
  const auto right = human_win_matrix(annotations, FramingFilter::right_only, items);
  const auto agg = aggregate(left, right);
  for (std::size_t i = 0; i < items.size(); ++i) CHECK(agg.win_mass(i, i) == 0.0);
  for (std::size_t i = 0; i < items.size(); ++i)
    for (std::size_t j = i + 1; j < items.size(); ++j)
      CHECK(agg.pair_mass(i, j) == left.pair_mass(i, j) + right.pair_mass(i, j));
}

TEST_CASE("confidence partition: thresholds, symmetry, exhaustiveness") {
  const std::vector<std::string> items{"a", "b", "c", "d"};
  // Model matrix via reps: a >> b (confident), c vs d mixed (unconfident).
  std::map<std::string, std::vector<int>> reps{
      {"a", {8, 8}}, {"b", {2, 2}}, {"c", {4, 5}}, {"d", {5, 4}}};
  const auto model = model_win_matrix(reps, items);

  std::vector<PairwiseAnnotation> annotations;
  // (a,b): 3 wins for a, 1 for b -> 0.75 confident (boundary inclusive).
  for (int k = 0; k < 3; ++k)
    annotations.push_back({"h", "a", "b", Framing::right, PairChoice::first});
  annotations.push_back({"h2", "a", "b", Framing::right, PairChoice::second});
  // (c,d): 2 equals -> 0.5 unconfident.
  annotations.push_back({"h3", "c", "d", Framing::right, PairChoice::equal});
  annotations.push_back({"h4", "c", "d", Framing::right, PairChoice::equal});
  const auto human = human_win_matrix(annotations, FramingFilter::right_only, items);

  PairSet pairs;
  pairs.pairs = {{"a", "b", {1, 2}}, {"c", "d", {1, 1}}};
  const auto part = confidence_partition(model, human, pairs, 0.25);

  const auto ab = part.flags.at({"a", "b"});
  CHECK(ab.model_confident);
  CHECK(ab.human_confident);  // |0.75 - 0.5| >= 0.25 boundary inclusive
  const auto cd = part.flags.at({"c", "d"});
  CHECK_FALSE(cd.model_confident);  // c vs d: shares near 0.5
  CHECK_FALSE(cd.human_confident);

  CHECK(part.p11.size() + part.p10.size() + part.p01.size() + part.p00.size() ==
        pairs.pairs.size());
  CHECK(part.p11 == std::vector<PairKey>{{"a", "b"}});
  CHECK(part.p00 == std::vector<PairKey>{{"c", "d"}});

  CHECK_THROWS_AS(confidence_partition(model, human, pairs, 0.0), ValidationError);
  CHECK_THROWS_AS(confidence_partition(model, human, pairs, 0.6), ValidationError);
}

TEST_CASE("confidence is orientation independent") {
  Rng rng(97, "cmp-orient");
  for (int trial = 0; trial < 50; ++trial) {
    const double w = static_cast<double>(rng.below(101)) / 100.0;
    const bool fwd = std::abs(w - 0.5) >= 0.25;
    const bool rev = std::abs((1.0 - w) - 0.5) >= 0.25;
    CHECK(fwd == rev);
  }
}
