#include "macsim/linkage.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "macsim/rng.hpp"
#include "support/oracles.hpp"

using namespace macsim;
using testsupport::link_pairs;

TEST_CASE("weight_table computes natural-log likelihood ratios") {
  MUGParams p{{0.9}, {0.1}, {0.0}};
  const WeightTable t = weight_table(p);
  // log(0.9 / 0.1) = log 9.
  CHECK(t.agree[0] == doctest::Approx(2.1972245773362196).epsilon(1e-12));
  CHECK(t.disagree[0] == doctest::Approx(-2.1972245773362196).epsilon(1e-12));
  CHECK(t.at(0, 1) == t.agree[0]);
  CHECK(t.at(0, -1) == t.disagree[0]);
  CHECK(t.at(0, 0) == 0.0);
}

TEST_CASE("an uninformative variable gets zero weights") {
  MUGParams p{{0.3}, {0.3}, {0.1}};
  const WeightTable t = weight_table(p);
  CHECK(t.agree[0] == 0.0);
  CHECK(t.disagree[0] == 0.0);
}

TEST_CASE("weight_table rejects degenerate denominators") {
  CHECK_THROWS_AS(weight_table(MUGParams{{0.9}, {0.0}, {0.0}}), DataError);
  CHECK_THROWS_AS(weight_table(MUGParams{{0.5}, {0.9}, {0.1}}), DataError);  // 1-u-g = 0
}

TEST_CASE("composite weights sum per-variable contributions") {
  MUGParams p{{0.9, 0.9}, {0.1, 0.1}, {0.0, 0.0}};
  const WeightTable t = weight_table(p);

  AgreementMatrix m;
  m.x_ids = {0, 1, 2};
  m.y_ids = {0};
  m.matched_col = {0, kNoMatch, kNoMatch};
  // Row 0 agrees everywhere, row 1 is all missing, row 2 mixes one agree
  // with one disagree.
  m.cells = TernaryArray::pack(3, 1, 2, {1, 1, 0, 0, 1, -1});

  const WeightMatrix w = composite_weights(m, t);
  REQUIRE(w.rows == 3);
  REQUIRE(w.cols == 1);
  CHECK(w.at(0, 0) == doctest::Approx(2.0 * 2.1972245773362196).epsilon(1e-12));
  CHECK(w.at(1, 0) == 0.0);
  CHECK(std::abs(w.at(2, 0)) < 1e-12);
}

TEST_CASE("composite weights reject a table of the wrong width") {
  MUGParams p{{0.9}, {0.1}, {0.0}};
  const WeightTable t = weight_table(p);
  AgreementMatrix m;
  m.x_ids = {0};
  m.y_ids = {0};
  m.matched_col = {0};
  m.cells = TernaryArray(1, 1, 2);
  CHECK_THROWS_AS(composite_weights(m, t), DataError);
}

TEST_CASE("greedy linking takes the best pairs one-to-one") {
  const WeightMatrix w{2, 2, {5, 1, 1, 4}};

  LinkSet at0 = greedy_link(w, 0.0);
  CHECK(link_pairs(at0) == std::vector<std::pair<int32_t, int32_t>>{{0, 0}, {1, 1}});
  CHECK(at0.links[0].weight == 5.0);
  CHECK(at0.links[1].weight == 4.0);
  CHECK(at0.x_partner == std::vector<int32_t>{0, 1});
  CHECK(at0.y_partner == std::vector<int32_t>{0, 1});

  LinkSet at45 = greedy_link(w, 4.5);
  CHECK(link_pairs(at45) == std::vector<std::pair<int32_t, int32_t>>{{0, 0}});
  CHECK(at45.x_partner == std::vector<int32_t>{0, kNoMatch});
  CHECK(at45.y_partner == std::vector<int32_t>{0, kNoMatch});

  CHECK(greedy_link(w, 10.0).links.empty());
}

TEST_CASE("a weight equal to the cutoff is not linked") {
  const WeightMatrix w{1, 1, {3.0}};
  CHECK(greedy_link(w, 3.0).links.empty());
  CHECK(greedy_link(w, std::nextafter(3.0, 0.0)).links.size() == 1);
}

TEST_CASE("ties break by ascending row then column") {
  const WeightMatrix w{2, 2, {1, 1, 1, 1}};
  const LinkSet links = greedy_link(w, 0.0);
  CHECK(link_pairs(links) == std::vector<std::pair<int32_t, int32_t>>{{0, 0}, {1, 1}});
}

TEST_CASE("greedy linking matches the reference matcher on small matrices") {
  Engine eng = make_engine(21, "test", 0);
  const double cutoffs[] = {-3.5, -1.0, 0.0, 0.5, 2.0, 3.0};
  for (int iter = 0; iter < 1000; ++iter) {
    const size_t rows = 1 + uniform_below(eng, 4);
    const size_t cols = 1 + uniform_below(eng, 4);
    WeightMatrix w{rows, cols, {}};
    w.w.resize(rows * cols);
    // Small integers force plenty of ties.
    for (auto& v : w.w) v = static_cast<double>(uniform_below(eng, 7)) - 3.0;
    const double cutoff = cutoffs[uniform_below(eng, 6)];

    const LinkSet fast = greedy_link(w, cutoff);
    CHECK(link_pairs(fast) == testsupport::oracle_greedy(w, cutoff));

    // Invariants: strict cutoff, one-to-one, consistent partner maps.
    std::set<int32_t> xs, ys;
    for (const Link& link : fast.links) {
      CHECK(link.weight > cutoff);
      CHECK(xs.insert(link.x).second);
      CHECK(ys.insert(link.y).second);
      CHECK(fast.x_partner[link.x] == link.y);
      CHECK(fast.y_partner[link.y] == link.x);
    }
    size_t linked_x = fast.links.size();
    CHECK(static_cast<size_t>(std::count_if(fast.x_partner.begin(), fast.x_partner.end(),
                                            [](int32_t v) { return v != kNoMatch; })) ==
          linked_x);
  }
}

TEST_CASE("raising the cutoff only removes links") {
  Engine eng = make_engine(22, "test", 0);
  for (int iter = 0; iter < 200; ++iter) {
    const size_t rows = 1 + uniform_below(eng, 6);
    const size_t cols = 1 + uniform_below(eng, 6);
    WeightMatrix w{rows, cols, {}};
    w.w.resize(rows * cols);
    for (auto& v : w.w) v = uniform01(eng) * 10.0 - 5.0;

    const PairRanking ranking(w);
    const double c1 = uniform01(eng) * 6.0 - 4.0;
    const double c2 = c1 + uniform01(eng) * 4.0;
    const auto low = link_pairs(ranking.link(c1));
    const auto high = link_pairs(ranking.link(c2));
    const std::set<std::pair<int32_t, int32_t>> low_set(low.begin(), low.end());
    for (const auto& pr : high) CHECK(low_set.count(pr) == 1);
    CHECK(high.size() <= low.size());
  }
}

TEST_CASE("a ranking can be reused across cutoffs") {
  const WeightMatrix w{3, 3, {2, 7, 1, 4, 4, 4, 0, 3, 6}};
  const PairRanking ranking(w);
  CHECK(ranking.rows() == 3);
  CHECK(ranking.cols() == 3);
  CHECK(ranking.max_weight() == 7.0);
  for (double cutoff : {-1.0, 0.0, 2.5, 4.0, 6.5, 7.0}) {
    const LinkSet reused = ranking.link(cutoff);
    const LinkSet fresh = greedy_link(w, cutoff);
    CHECK(link_pairs(reused) == link_pairs(fresh));
  }
}

TEST_CASE("an empty weight matrix yields no links and -inf max weight") {
  const WeightMatrix w{0, 0, {}};
  const PairRanking ranking(w);
  CHECK(ranking.max_weight() == -std::numeric_limits<double>::infinity());
  const LinkSet links = ranking.link(0.0);
  CHECK(links.links.empty());
  CHECK(links.x_partner.empty());
  CHECK(links.y_partner.empty());
}

TEST_CASE("link csv lists accepted pairs with file recids") {
  FilePair pair;
  pair.file_y = {{1, {}}, {2, {}}};
  pair.file_x = {{11, {}}, {12, {}}};
  pair.truth = {0, 1};

  AgreementMatrix m;
  m.block_id = "B7";
  m.x_ids = {0, 1};
  m.y_ids = {0, 1};
  m.matched_col = {0, 1};
  m.cells = TernaryArray(2, 2, 1);

  LinkSet links;
  links.cutoff = 0.0;
  links.links = {{0, 1, 2.5}, {1, 0, 1.0}};
  links.x_partner = {1, 0};
  links.y_partner = {1, 0};

  const std::string dir = testsupport::scratch_dir("linkage");
  const std::string path = dir + "/links.csv";
  LinkCsvWriter writer(path);
  writer.block(m, pair, links);
  writer.close();

  CHECK(testsupport::read_file_bytes(path) ==
        "block_id,x_recid,y_recid,weight\n"
        "B7,11,2,2.5\n"
        "B7,12,1,1\n");
}
