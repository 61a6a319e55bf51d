#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "graphtune/io.hpp"
#include "graphtune/pipeline.hpp"
#include "ring_network.hpp"
#include "support.hpp"

namespace gt = graphtune;

namespace {

gt::PipelineConfig ring_config() {
  gt::PipelineConfig cfg;
  cfg.retrieval.k = 10;
  return cfg;
}

gt::ErrorCode code_of(const std::function<void()>& fn, std::string* message = nullptr) {
  try {
    fn();
  } catch (const gt::Error& e) {
    if (message) *message = e.what();
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return gt::ErrorCode::Io;
}

}  // namespace

TEST(Config, DefaultsMatchDocumentedValues) {
  const auto c = gt::parse_config("{}");
  EXPECT_EQ(c.retrieval.k, 5);
  EXPECT_EQ(c.retrieval.epsilon, 0.5);
  EXPECT_FALSE(c.retrieval.min_count.has_value());
  EXPECT_EQ(c.deform.alpha, 1.0);
  EXPECT_EQ(c.deform.beta, 5.0);
  EXPECT_EQ(c.deform.gamma, 1000.0);
  EXPECT_EQ(c.filter.r_u, 0.5);
  EXPECT_EQ(c.filter.r_d, 2.0);
  EXPECT_FALSE(c.merge.d.has_value());
  EXPECT_EQ(c.embedding.scales, (std::vector<double>{0.5, 1.0}));
}

TEST(Config, RoundTripsThroughJson) {
  const auto c = gt::parse_config(R"({"retrieval":{"k":7,"min":3,"max":9,"epsilon":0.8},
      "deform":{"alpha":0.5,"gamma":200},"filter":{"r_u":0.25},"merge":{"d":1.5,"mode":"geodesic","include_exemplar":true},
      "match":{"radius_factor":3,"lambda":0.1},"embedding":{"sample_count":10},"seed":4})");
  EXPECT_EQ(c.retrieval.k, 7);
  EXPECT_EQ(*c.retrieval.min_count, 3);
  EXPECT_EQ(c.merge.mode, gt::SurroundingsDistance::Geodesic);
  EXPECT_EQ(c.merge.deform.gamma, 200.0);
  EXPECT_TRUE(c.include_exemplar);
  EXPECT_EQ(c.seed, 4u);
  const auto back = gt::config_from_json(gt::config_to_json(c));
  EXPECT_EQ(gt::config_to_json(back), gt::config_to_json(c));
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_EQ(code_of([] { gt::parse_config(R"({"retreival":{}})"); }), gt::ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { gt::parse_config(R"({"deform":{"gama":1}})"); }), gt::ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { gt::parse_config(R"({"retrieval":{"epsilon":2}})"); }), gt::ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { gt::parse_config(R"({"deform":{"alpha":"x"}})"); }), gt::ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { gt::parse_config(R"({"merge":{"mode":"manhattan"}})"); }), gt::ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { gt::parse_config("{"); }), gt::ErrorCode::MalformedSyntax);
}

TEST(Pipeline, RetrievedRingsBecomePolygons) {
  for (const std::uint64_t seed : {0u, 1u, 2u}) {
    const auto net = gt::testing::make_ring_network(seed, 1.6, 1.6);
    const auto res = gt::run_pipeline(net.graph, net.exemplar, net.polygon, ring_config());
    ASSERT_EQ(res.targets.size(), 4u);
    for (std::size_t r = 1; r < net.rings.size(); ++r) {
      EXPECT_GT(gt::testing::ring_length_cv(net.graph, net.rings[r]), 0.1);
      EXPECT_LT(gt::testing::ring_length_cv(res.merged, net.rings[r]), 0.1);
    }
    // Without include_exemplar the exemplar keeps its input positions.
    for (const auto v : net.rings[0]) EXPECT_EQ(res.merged.position(v), net.graph.position(v));
  }
}

TEST(Pipeline, IncludeExemplarPastesItsModification) {
  const auto net = gt::testing::make_ring_network(3, 1.6, 1.6);
  auto cfg = ring_config();
  cfg.include_exemplar = true;
  const auto res = gt::run_pipeline(net.graph, net.exemplar, net.polygon, cfg);
  for (std::size_t k = 0; k < 8; ++k) EXPECT_EQ(res.merged.position(net.rings[0][k]), net.polygon.position(k));
}

TEST(Pipeline, NoTwinsAtEpsilonOneLeavesGraphUnchanged) {
  std::mt19937_64 rng(17);
  const auto g = gt::testing::random_connected_graph(30, 12, rng);
  gt::Structure ex{"g", {}};
  for (const auto v : g.neighbors(0)) ex.nodes.push_back(g.id(v));
  ex.nodes.push_back(g.id(0));
  auto pts = gt::induced_subgraph(g, ex).positions();
  for (auto& p : pts) p = p * 1.3;
  const auto mod = gt::induced_subgraph(g, ex).with_positions(pts);
  auto cfg = gt::PipelineConfig{};
  cfg.retrieval.epsilon = 1.0;
  const auto res = gt::run_pipeline(g, ex, mod, cfg);
  EXPECT_EQ(gt::serialize_graph(res.merged), gt::serialize_graph(g));
  EXPECT_EQ(gt::pipeline_summary(res)["transferred"], 0);
}

TEST(Pipeline, ByteIdenticalReruns) {
  const auto net = gt::testing::make_ring_network(4, 5.5, 0.9);
  const auto a = gt::run_pipeline(net.graph, net.exemplar, net.polygon, ring_config());
  const auto b = gt::run_pipeline(net.graph, net.exemplar, net.polygon, ring_config());
  EXPECT_EQ(gt::serialize_graph(a.merged), gt::serialize_graph(b.merged));
  EXPECT_EQ(gt::pipeline_summary(a).dump(), gt::pipeline_summary(b).dump());
}

TEST(Pipeline, EmbeddingCacheGivesSameResult) {
  const auto net = gt::testing::make_ring_network(5, 1.6, 1.6);
  const auto dir = std::filesystem::temp_directory_path() / "graphtune_pipeline_cache";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "emb.json").string();
  std::filesystem::remove(path);
  auto cfg = ring_config();
  cfg.embedding_cache = path;
  const auto cold = gt::run_pipeline(net.graph, net.exemplar, net.polygon, cfg);
  ASSERT_TRUE(std::filesystem::exists(path));
  const auto warm = gt::run_pipeline(net.graph, net.exemplar, net.polygon, cfg);
  const auto plain = gt::run_pipeline(net.graph, net.exemplar, net.polygon, ring_config());
  EXPECT_EQ(gt::serialize_graph(cold.merged), gt::serialize_graph(plain.merged));
  EXPECT_EQ(gt::serialize_graph(warm.merged), gt::serialize_graph(plain.merged));
  std::filesystem::remove_all(dir);
}

TEST(Pipeline, ErrorsCarryTheirStage) {
  const auto net = gt::testing::make_ring_network(6, 1.6, 1.6);
  std::string msg;
  EXPECT_EQ(code_of([&] { gt::run_pipeline(net.graph, {"x", {"n001", "zzz"}}, net.polygon, {}); }, &msg),
            gt::ErrorCode::UnknownNode);
  EXPECT_EQ(msg.rfind("input: ", 0), 0u) << msg;
  const gt::Graph partial({{"n002", {0, 0}}}, std::vector<gt::Edge>{});
  EXPECT_EQ(code_of([&] { gt::run_pipeline(net.graph, net.exemplar, partial, {}); }, &msg), gt::ErrorCode::NodeSetMismatch);
  EXPECT_EQ(msg.rfind("input: ", 0), 0u) << msg;
  auto bad = gt::PipelineConfig{};
  bad.retrieval.k = 0;
  EXPECT_EQ(code_of([&] { gt::run_pipeline(net.graph, net.exemplar, net.polygon, bad); }), gt::ErrorCode::InvalidArgument);
}

TEST(Pipeline, SummaryShape) {
  const auto net = gt::testing::make_ring_network(7, 1.6, 1.6);
  const auto j = gt::pipeline_summary(gt::run_pipeline(net.graph, net.exemplar, net.polygon, ring_config()));
  EXPECT_EQ(j["transferred"], 4);
  ASSERT_EQ(j["targets"].size(), 4u);
  for (const auto& t : j["targets"]) {
    EXPECT_TRUE(t["similarity"].is_number());
    EXPECT_GE(t["markers"].size(), 2u);
    EXPECT_TRUE(t["rounds"].is_number_integer());
  }
  EXPECT_TRUE(j["report"]["delta"].contains("crosslessness"));
}

TEST(AutoMarkers, CycleAgainstRelabelledCycleNeedsNoFallback) {
  std::mt19937_64 rng(3);
  for (const std::size_t n : {5u, 8u, 11u}) {
    const auto s = gt::testing::cycle_graph(n);
    const auto t = gt::testing::relabel(s, rng).graph;
    const auto m = gt::auto_markers(s, t, {});
    EXPECT_FALSE(m.fallback);
    EXPECT_EQ(m.size(), n);
  }
}
