#include "doctest.h"

#include <cmath>
#include <set>

#include "stanceval/errors.hpp"
#include "stanceval/pair_design.hpp"
#include "stanceval/rng.hpp"

using namespace stanceval;

namespace {

std::map<std::string, double> scores_spanning_middle_deciles(std::size_t per_decile) {
  // Scores in deciles 1..8 (ranges 10-90); 0-10 and 90-100 stay empty.
  std::map<std::string, double> scores;
  int next = 0;
  for (int d = 1; d <= 8; ++d)
    for (std::size_t i = 0; i < per_decile; ++i) {
      char buf[16];
      std::snprintf(buf, sizeof buf, "a%03d", next++);
      scores[buf] = d * 10.0 + 2.0 + static_cast<double>(i) * 6.0 / static_cast<double>(per_decile);
    }
  return scores;
}

}  // namespace

TEST_CASE("bin_scores: middle deciles occupied, outer empty, K=8") {
  const auto binning = bin_scores(scores_spanning_middle_deciles(4));
  CHECK(binning.k == 8);
  CHECK(binning.occupied_deciles == std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8});
  for (const auto& [id, b] : binning.bin) {
    CHECK(b >= 1);
    CHECK(b <= 8);
  }
}

TEST_CASE("bin_scores: boundary and degenerate cases") {
  CHECK(PositionBinning::decile_of(10.0) == 1);   // [10,20)
  CHECK(PositionBinning::decile_of(9.999) == 0);
  CHECK(PositionBinning::decile_of(100.0) == 9);  // last decile closed
  CHECK_THROWS_AS(PositionBinning::decile_of(100.5), ValidationError);

  const auto single = bin_scores({{"a", 33.0}, {"b", 35.0}, {"c", 39.9}});
  CHECK(single.k == 1);
  CHECK(single.bin.at("a") == 1);

  // Occupied deciles relabel in order even with gaps.
  const auto gappy = bin_scores({{"a", 5.0}, {"b", 55.0}, {"c", 95.0}});
  CHECK(gappy.k == 3);
  CHECK(gappy.bin.at("a") == 1);
  CHECK(gappy.bin.at("b") == 2);
  CHECK(gappy.bin.at("c") == 3);
}

TEST_CASE("bin_scores: translation within deciles keeps assignments") {
  auto scores = scores_spanning_middle_deciles(3);
  const auto base = bin_scores(scores);
  for (auto& [id, s] : scores) s += 1.5;  // stays within each decile by construction
  const auto shifted = bin_scores(scores);
  CHECK(base.bin == shifted.bin);
}

TEST_CASE("sample_pairs: quotas, capping, stratum tags") {
  const auto binning = bin_scores(scores_spanning_middle_deciles(5));  // 5 per bin: C(5,2)=10
  const auto pairs = sample_pairs(binning, 100, 2, 11);
  // intra capped at 10 per bin, inter 2 per bin pair: 8*10 + 28*2 = 136.
  CHECK(pairs.pairs.size() == 136);
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& p : pairs.pairs) {
    CHECK(p.arg_i < p.arg_j);
    CHECK(seen.emplace(p.arg_i, p.arg_j).second);  // no duplicates
    const int bi = binning.bin.at(p.arg_i);
    const int bj = binning.bin.at(p.arg_j);
    if (p.stratum.intra()) {
      CHECK(bi == p.stratum.b1);
      CHECK(bj == p.stratum.b1);
    } else {
      CHECK(std::min(bi, bj) == p.stratum.b1);
      CHECK(std::max(bi, bj) == p.stratum.b2);
    }
  }
}

TEST_CASE("sample_pairs: zero quotas give an empty set; determinism under seed") {
  const auto binning = bin_scores(scores_spanning_middle_deciles(4));
  CHECK(sample_pairs(binning, 0, 0, 1).pairs.empty());
  const auto a = sample_pairs(binning, 3, 1, 42);
  const auto b = sample_pairs(binning, 3, 1, 42);
  REQUIRE(a.pairs.size() == b.pairs.size());
  for (std::size_t i = 0; i < a.pairs.size(); ++i) {
    CHECK(a.pairs[i].arg_i == b.pairs[i].arg_i);
    CHECK(a.pairs[i].arg_j == b.pairs[i].arg_j);
  }
}

TEST_CASE("sample_pairs: single tiny bin takes all pairs") {
  const auto binning = bin_scores({{"a", 1.0}, {"b", 2.0}, {"c", 3.0}, {"d", 4.0}, {"e", 5.0}});
  const auto pairs = sample_pairs(binning, 100, 0, 5);
  CHECK(pairs.pairs.size() == 10);  // C(5,2)
}

TEST_CASE("connectivity check") {
  const std::vector<std::string> items{"a", "b", "c", "d"};
  PairSet path;
  path.pairs = {{"a", "b", {1, 1}}, {"b", "c", {1, 1}}, {"c", "d", {1, 1}}};
  CHECK(check_connectivity(path, items));

  PairSet split;
  split.pairs = {{"a", "b", {1, 1}}, {"c", "d", {1, 1}}};
  CHECK_FALSE(check_connectivity(split, items));

  PairSet empty;
  CHECK_FALSE(check_connectivity(empty, items));
}

TEST_CASE("sample size check against n ln n") {
  PairSet pairs;
  for (int i = 0; i < 934; ++i)
    pairs.pairs.push_back({"x" + std::to_string(i), "y" + std::to_string(i), {1, 1}});
  const auto check = check_sample_size(pairs, 100);
  CHECK(check.ok);
  CHECK(check.target == doctest::Approx(460.517).epsilon(1e-4));

  pairs.pairs.resize(400);
  CHECK_FALSE(check_sample_size(pairs, 100).ok);

  PairSet two;
  two.pairs = {{"a", "b", {1, 1}}, {"a", "c", {1, 1}}};
  const auto small = check_sample_size(two, 2);
  CHECK(small.ok);
  CHECK(small.target == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(check_sample_size(two, 1), ValidationError);
}

TEST_CASE("node entropy: uniform over 8 bins hits exactly 3 bits") {
  // One probe item in bin 1 compared once into every bin.
  std::map<std::string, double> scores;
  scores["probe"] = 12.0;
  for (int d = 1; d <= 8; ++d) scores["peer" + std::to_string(d)] = d * 10.0 + 5.0;
  const auto binning = bin_scores(scores);
  REQUIRE(binning.k == 8);
  PairSet pairs;
  for (int d = 1; d <= 8; ++d) {
    std::string peer = "peer" + std::to_string(d);
    std::string lhs = std::min<std::string>("probe", peer);
    std::string rhs = std::max<std::string>("probe", peer);
    pairs.pairs.push_back({lhs, rhs, {std::min(1, d), std::max(1, d)}});
  }
  // Keep peers non-isolated: chain them.
  for (int d = 1; d < 8; ++d)
    pairs.pairs.push_back({"peer" + std::to_string(d), "peer" + std::to_string(d + 1),
                           {d, d + 1}});
  const auto entropy = node_entropy(pairs, binning);
  CHECK(entropy.by_item.at("probe") == 3.0);
  for (const auto& [id, h] : entropy.by_item) {
    CHECK(h >= 0.0);
    CHECK(h <= 3.0 + 1e-12);
  }
}

TEST_CASE("node entropy: degenerate distributions and isolation error") {
  std::map<std::string, double> scores{{"a", 12.0}, {"b", 14.0}, {"c", 25.0}, {"d", 45.0}};
  const auto binning = bin_scores(scores);
  PairSet pairs;
  pairs.pairs = {{"a", "b", {1, 1}}, {"a", "c", {1, 2}}, {"b", "c", {1, 2}}, {"c", "d", {2, 3}}};
  SUBCASE("all comparisons within one bin give zero entropy") {
    PairSet intra_only;
    intra_only.pairs = {{"a", "b", {1, 1}}};
    std::map<std::string, double> two{{"a", 12.0}, {"b", 14.0}};
    const auto e = node_entropy(intra_only, bin_scores(two));
    CHECK(e.by_item.at("a") == 0.0);
  }
  SUBCASE("half/half over two bins gives one bit") {
    PairSet half;
    half.pairs = {{"a", "b", {1, 1}}, {"a", "c", {1, 2}}};
    std::map<std::string, double> three{{"a", 12.0}, {"b", 14.0}, {"c", 25.0}};
    // b and c each have one comparison; a splits evenly between bins 1 and 2.
    const auto e = node_entropy(half, bin_scores(three));
    CHECK(e.by_item.at("a") == 1.0);
  }
  SUBCASE("isolated item is named in the error") {
    std::map<std::string, double> extra = scores;
    extra["lonely"] = 88.0;
    CHECK_THROWS_WITH_AS(node_entropy(pairs, bin_scores(extra)), doctest::Contains("lonely"),
                         ValidationError);
  }
}

TEST_CASE("sample_pairs is invariant to item insertion order via canonical enumeration") {
  // Same items presented in different map order produce identical pair sets
  // (maps iterate sorted, so feed reversed construction order instead).
  auto scores = scores_spanning_middle_deciles(4);
  std::map<std::string, double> reversed;
  for (auto it = scores.rbegin(); it != scores.rend(); ++it) reversed.insert(*it);
  const auto a = sample_pairs(bin_scores(scores), 5, 2, 9);
  const auto b = sample_pairs(bin_scores(reversed), 5, 2, 9);
  REQUIRE(a.pairs.size() == b.pairs.size());
  for (std::size_t i = 0; i < a.pairs.size(); ++i) {
    CHECK(a.pairs[i].arg_i == b.pairs[i].arg_i);
    CHECK(a.pairs[i].arg_j == b.pairs[i].arg_j);
  }
}
