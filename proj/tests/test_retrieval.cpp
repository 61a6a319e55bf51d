#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "graphtune/retrieval.hpp"
#include "support.hpp"

namespace gt = graphtune;
using gt::testing::make_graph;

namespace {

// Weisfeiler-Lehman written with string labels: a node's new label is its
// old label followed by the sorted multiset of neighbour labels.
double wl_oracle(const gt::Graph& a, const gt::Graph& b, int iterations) {
  std::vector<std::string> la(a.size(), "0"), lb(b.size(), "0");
  double dot = 0, na = 0, nb = 0;
  auto tally = [&] {
    std::map<std::string, double> ca, cb;
    for (const auto& l : la) ca[l] += 1;
    for (const auto& l : lb) cb[l] += 1;
    for (const auto& [l, c] : ca) {
      na += c * c;
      if (cb.count(l)) dot += c * cb[l];
    }
    for (const auto& [l, c] : cb) nb += c * c;
  };
  auto step = [](const gt::Graph& g, const std::vector<std::string>& l) {
    std::vector<std::string> out(g.size());
    for (std::size_t v = 0; v < g.size(); ++v) {
      std::vector<std::string> nbr;
      for (const auto w : g.neighbors(v)) nbr.push_back(l[w]);
      std::sort(nbr.begin(), nbr.end());
      std::string s = "(" + l[v] + "|";
      for (const auto& x : nbr) s += x + ",";
      out[v] = s + ")";
    }
    return out;
  };
  tally();
  for (int r = 0; r < iterations; ++r) {
    la = step(a, la);
    lb = step(b, lb);
    tally();
  }
  return dot / std::sqrt(na * nb);
}

gt::Graph triangle(const std::string& prefix = "n") {
  return make_graph({{0, 0}, {1, 0}, {0, 1}}, {{0, 1}, {1, 2}, {0, 2}}, prefix);
}

// Three copies of a fixed 10-node motif, chained through two-node bridges
// that hang off each copy's first node.
struct Planted {
  gt::Graph g;
  std::vector<std::vector<std::string>> copies;
};

Planted three_copies() {
  // Dense and asymmetric: every node has degree >= 3, so the degree-2 bridge
  // nodes look nothing like motif nodes.
  const std::vector<std::pair<std::size_t, std::size_t>> motif{
      {0, 1}, {0, 3}, {0, 6}, {0, 8}, {1, 3}, {1, 6}, {1, 7}, {1, 8}, {2, 5}, {2, 6}, {2, 9},
      {3, 4}, {3, 5}, {3, 8}, {4, 5}, {4, 6}, {4, 8}, {5, 7}, {6, 8}, {6, 9}, {7, 8}, {8, 9}};
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::vector<std::vector<std::string>> copies;
  for (std::size_t c = 0; c < 3; ++c) {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < 10; ++i) ids.push_back(gt::testing::node_name(10 * c + i));
    for (const auto& [a, b] : motif) edges.emplace_back(10 * c + a, 10 * c + b);
    copies.push_back(ids);
  }
  // bridge nodes 30..35
  for (std::size_t c = 0; c < 3; ++c) {
    const std::size_t b1 = 30 + 2 * c, b2 = b1 + 1;
    edges.emplace_back(10 * c, b1);
    edges.emplace_back(b1, b2);
    edges.emplace_back(b2, 10 * ((c + 1) % 3));
  }
  std::mt19937_64 rng(1);
  return {make_graph(gt::testing::random_points(36, rng), edges), copies};
}

}  // namespace

TEST(WlSimilarity, SelfAndIsomorphicCopiesScoreOne) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = gt::testing::random_graph(12, 0.3, rng);
    EXPECT_EQ(gt::wl_similarity(g, g), 1.0);
    EXPECT_EQ(gt::wl_similarity(g, gt::testing::relabel(g, rng).graph), 1.0);
  }
  EXPECT_EQ(gt::wl_similarity(triangle(), triangle("t")), 1.0);
}

TEST(WlSimilarity, PathVersusTriangleMatchesOracle) {
  const double got = gt::wl_similarity(gt::testing::path_graph(3), triangle(), 2);
  EXPECT_NEAR(got, wl_oracle(gt::testing::path_graph(3), triangle(), 2), 1e-12);
  EXPECT_LT(got, 1.0);
}

TEST(WlSimilarity, RandomPairsMatchOracleAndAreSymmetric) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = gt::testing::random_graph(3 + trial % 9, 0.35, rng);
    const auto b = gt::testing::random_graph(3 + (trial * 7) % 11, 0.35, rng);
    const int it = trial % 4;
    const double ab = gt::wl_similarity(a, b, it);
    EXPECT_NEAR(ab, wl_oracle(a, b, it), 1e-12);
    EXPECT_NEAR(ab, gt::wl_similarity(b, a, it), 1e-12);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0);
  }
}

TEST(InduceCandidates, SizeFilter) {
  const auto path = gt::testing::path_graph(5);
  EXPECT_TRUE(gt::induce_candidate_substructures(path, {"n000", "n001", "n002", "n003", "n004"}, 10, 20).empty());
  const auto two = make_graph({{0, 0}, {1, 0}, {0, 1}, {5, 0}, {6, 0}, {5, 1}, {9, 9}},
                              {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}, {5, 6}});
  const auto got =
      gt::induce_candidate_substructures(two, {"n000", "n001", "n002", "n003", "n004", "n005"}, 3, 3);
  ASSERT_EQ(got.size(), 2u);
  EXPECT_EQ(got[0].nodes, (std::vector<std::string>{"n000", "n001", "n002"}));
  EXPECT_EQ(got[1].nodes, (std::vector<std::string>{"n003", "n004", "n005"}));
}

TEST(InduceCandidates, MatchesComponentsThenFilter) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 30; ++trial) {
    const auto g = gt::testing::random_graph(40, 0.06, rng);
    std::vector<std::string> cand;
    std::bernoulli_distribution coin(0.5);
    for (std::size_t i = 0; i < g.size(); ++i)
      if (coin(rng)) cand.push_back(g.id(i));
    const int lo = 1 + trial % 3, hi = lo + trial % 5;
    std::set<std::set<std::string>> expected, got;
    for (const auto& comp : gt::connected_components(gt::induced_subgraph(g, gt::Structure{"", cand}))) {
      const auto sz = static_cast<int>(comp.size());
      if (sz >= lo && sz <= hi) expected.emplace(comp.begin(), comp.end());
    }
    for (const auto& s : gt::induce_candidate_substructures(g, cand, lo, hi)) {
      got.emplace(s.nodes.begin(), s.nodes.end());
      EXPECT_TRUE(gt::is_connected(gt::induced_subgraph(g, s)));
    }
    EXPECT_EQ(got, expected);
  }
}

TEST(RetrievalParams, DefaultsFollowExemplarSize) {
  const auto p = gt::RetrievalParams{}.resolved(7);
  EXPECT_EQ(*p.min_count, 4);
  EXPECT_EQ(*p.max_count, 14);
  EXPECT_EQ(p.k, 5);
  EXPECT_DOUBLE_EQ(p.epsilon, 0.5);
  gt::RetrievalParams bad;
  bad.min_count = 9;
  bad.max_count = 3;
  EXPECT_THROW(bad.validate(), gt::Error);
  bad = {};
  bad.epsilon = 1.5;
  EXPECT_THROW(bad.validate(), gt::Error);
}

TEST(Retrieve, PlantedCopiesFoundWithFullSimilarity) {
  const auto pl = three_copies();
  const auto emb = gt::compute_embeddings(pl.g);
  gt::RetrievalParams p;
  p.k = 5;
  p.min_count = 5;
  p.max_count = 20;
  p.epsilon = 0.5;
  const auto res = gt::retrieve_similar(pl.g, gt::Structure{"g", pl.copies[0]}, emb, p);
  std::set<std::set<std::string>> returned;
  for (const auto& r : res) {
    returned.emplace(r.structure.nodes.begin(), r.structure.nodes.end());
    EXPECT_GE(r.similarity, p.epsilon);
  }
  for (std::size_t c = 1; c < 3; ++c) {
    const std::set<std::string> copy(pl.copies[c].begin(), pl.copies[c].end());
    ASSERT_TRUE(returned.count(copy)) << "copy " << c << " missing";
    for (const auto& r : res)
      if (std::set<std::string>(r.structure.nodes.begin(), r.structure.nodes.end()) == copy)
        EXPECT_EQ(r.similarity, 1.0);
  }
  for (std::size_t k = 1; k < res.size(); ++k) EXPECT_GE(res[k - 1].similarity, res[k].similarity);
}

TEST(Retrieve, ExemplarItselfIsSuppressed) {
  const auto pl = three_copies();
  const auto emb = gt::compute_embeddings(pl.g);
  const auto res = gt::retrieve_similar(pl.g, gt::Structure{"g", pl.copies[0]}, emb, {});
  const std::set<std::string> ex(pl.copies[0].begin(), pl.copies[0].end());
  for (const auto& r : res) {
    std::size_t overlap = 0;
    for (const auto& id : r.structure.nodes) overlap += ex.count(id);
    EXPECT_LE(2 * overlap, r.structure.nodes.size());
  }
}

TEST(Retrieve, StrictThresholdWithoutTwinIsEmpty) {
  std::mt19937_64 rng(5);
  const auto g = gt::testing::random_connected_graph(40, 8, rng);
  const auto emb = gt::compute_embeddings(g);
  gt::RetrievalParams p;
  p.epsilon = 1.0;
  const gt::Structure ex{"g", {"n000", "n001", "n002", "n003", "n004", "n005"}};
  for (const auto& r : gt::retrieve_similar(g, ex, emb, p)) {
    // Only a structure isomorphic up to WL could pass; none is planted here.
    EXPECT_EQ(r.similarity, 1.0);
  }
}

TEST(Retrieve, WidePowerNetworkStyleQueryIsRankedAndBounded) {
  std::mt19937_64 rng(44);
  const auto g = gt::testing::random_connected_graph(300, 60, rng);
  const auto emb = gt::compute_embeddings(g);
  gt::Structure ex{"g", {}};
  for (std::size_t i = 0; i < 20; ++i) ex.nodes.push_back(g.id(i));
  gt::RetrievalParams p;
  p.min_count = 10;
  p.max_count = 100;
  p.k = 5;
  p.epsilon = 0.5;
  const auto res = gt::retrieve_similar(g, ex, emb, p);
  const auto again = gt::retrieve_similar(g, ex, emb, p);
  ASSERT_EQ(res.size(), again.size());
  for (std::size_t k = 0; k < res.size(); ++k) {
    EXPECT_EQ(res[k].structure, again[k].structure);
    EXPECT_GE(res[k].structure.nodes.size(), 10u);
    EXPECT_LE(res[k].structure.nodes.size(), 100u);
    EXPECT_TRUE(gt::is_connected(gt::induced_subgraph(g, res[k].structure)));
    if (k) EXPECT_GE(res[k - 1].similarity, res[k].similarity);
  }
}
