#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "graphtune/deform.hpp"
#include "graphtune/layout.hpp"
#include "support.hpp"

namespace gt = graphtune;

namespace {

gt::Graph arc() {
  return gt::testing::make_graph({{0, 0}, {1, -0.5}, {2, -0.8}, {3, -0.5}, {4, 0}}, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
}

std::vector<gt::Anchor> pull_arc() { return {{"n000", {0, 0}}, {"n004", {4, 0}}, {"n002", {2, 0.8}}}; }

double mean_orientation_change(const gt::Graph& a, const gt::Graph& b) {
  double s = 0.0;
  for (const auto& e : a.edges()) {
    s += gt::norm(gt::normalized(a.position(e.v) - a.position(e.u)) - gt::normalized(b.position(e.v) - b.position(e.u)));
  }
  return s / static_cast<double>(a.edge_count());
}

double max_pair_distance_change(const gt::Graph& a, const gt::Graph& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const double da = gt::distance(a.position(i), a.position(j));
      m = std::max(m, std::abs(gt::distance(b.position(i), b.position(j)) - da) / da);
    }
  return m;
}

}  // namespace

TEST(Deform, AnchorsAtCurrentPositionsLeaveLayoutUnchanged) {
  std::mt19937_64 rng(3);
  const auto g = gt::testing::random_connected_graph(12, 4, rng);
  std::vector<gt::Anchor> anchors;
  for (std::size_t i = 0; i < g.size(); i += 4) anchors.push_back({g.id(i), g.position(i)});
  const auto r = gt::deform_with_trace(g, anchors, {});
  EXPECT_LE(gt::max_displacement(r.graph.positions(), g.positions()), 1e-9);
  EXPECT_TRUE(r.converged);
}

TEST(Deform, DistanceOnlyWeightsPreserveDistances) {
  gt::DeformParams p;
  p.alpha = 0.0;
  p.beta = 1.0;
  p.gamma = 100.0;
  const auto out = gt::deform(arc(), pull_arc(), p);
  EXPECT_LE(max_pair_distance_change(arc(), out), 0.05);
  EXPECT_GT(mean_orientation_change(arc(), out), 0.1);
}

TEST(Deform, OrientationWeightReducesOrientationChange) {
  gt::DeformParams p0, p1;
  p0.alpha = 0.0;
  p0.beta = 1.0;
  p0.gamma = 100.0;
  p1 = p0;
  p1.alpha = 1.0;
  const auto d0 = gt::deform(arc(), pull_arc(), p0);
  const auto d1 = gt::deform(arc(), pull_arc(), p1);
  const double o0 = mean_orientation_change(arc(), d0);
  EXPECT_LT(mean_orientation_change(arc(), d1), o0);
  EXPECT_LT(max_pair_distance_change(arc(), d1), o0);
}

TEST(Deform, EnergyNeverIncreases) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int trial = 0; trial < 15; ++trial) {
    const auto g = gt::testing::random_connected_graph(5 + 6 * trial, trial, rng);
    std::vector<gt::Anchor> anchors;
    for (std::size_t i = 0; i < g.size(); i += 3) anchors.push_back({g.id(i), {u(rng), u(rng)}});
    const auto r = gt::deform_with_trace(g, anchors, {});
    for (std::size_t k = 1; k < r.energy.size(); ++k) EXPECT_LE(r.energy[k], r.energy[k - 1] * (1 + 1e-9));
    EXPECT_NEAR(r.energy.back(), r.final_terms.total, 1e-9 * std::abs(r.final_terms.total));
  }
}

TEST(Deform, SparsePairSetAboveLimit) {
  std::mt19937_64 rng(2);
  const auto g = gt::reference_layout(gt::testing::random_connected_graph(40, 10, rng));
  gt::DeformParams p;
  p.full_pair_limit = 10;  // force edge + two-hop pairs
  std::vector<gt::Anchor> anchors{{g.id(0), g.position(0) + gt::Point{1, 0}}, {g.id(5), g.position(5)}};
  const auto r = gt::deform_with_trace(g, anchors, p);
  for (std::size_t k = 1; k < r.energy.size(); ++k) EXPECT_LE(r.energy[k], r.energy[k - 1] * (1 + 1e-9));
  EXPECT_LT(r.energy.back(), r.energy.front());
}

TEST(Deform, EnergyTermsScaleBehaviour) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto ref = gt::testing::random_connected_graph(15, 5, rng);
    const auto moved = ref.with_positions(gt::testing::random_points(15, rng));
    std::vector<gt::Point> scaled = moved.positions();
    for (auto& q : scaled) q = q * 2.5;
    const std::vector<gt::Anchor> anchors{{ref.id(0), ref.position(0)}};
    const auto a = gt::deformation_energy(ref, moved, anchors, {});
    const auto b = gt::deformation_energy(ref, ref.with_positions(scaled), anchors, {});
    EXPECT_NEAR(a.orientation, b.orientation, 1e-9 * a.orientation);
    EXPECT_GT(std::abs(a.distance - b.distance), 1e-3 * a.distance);
  }
}

TEST(Deform, StrongMarkerWeightLandsMarkers) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = gt::reference_layout(gt::testing::random_connected_graph(10 + 3 * trial, trial, rng));
    const double diag = gt::bounding_box(g.positions()).diagonal();
    std::vector<gt::Point> goals;
    for (const auto& q : g.positions()) goals.push_back({q.x + 0.1 * diag * std::sin(3 * q.y / diag), q.y});
    std::vector<gt::Anchor> anchors;
    for (std::size_t i = 0; i < g.size(); i += 3) anchors.push_back({g.id(i), goals[i]});
    const auto out = gt::deform(g, anchors, {});
    const double gd = gt::bounding_box(goals).diagonal();
    for (const auto& a : anchors) EXPECT_LE(gt::distance(out.position(*out.index_of(a.node)), a.goal), 0.01 * gd);
  }
}

TEST(Deform, Errors) {
  const auto g = arc();
  auto code = [&](auto&& f) {
    try {
      f();
    } catch (const gt::Error& e) {
      return e.code();
    }
    return gt::ErrorCode::Io;
  };
  EXPECT_EQ(code([&] { gt::deform(g, {}); }), gt::ErrorCode::NoAnchors);
  EXPECT_EQ(code([&] { gt::deform(g, {{"zz", {0, 0}}}); }), gt::ErrorCode::UnknownNode);
  const auto flat = gt::testing::make_graph({{1, 1}, {1, 1}, {1, 1}}, {{0, 1}, {1, 2}});
  EXPECT_EQ(code([&] { gt::deform(flat, {{"n000", {0, 0}}}); }), gt::ErrorCode::CoincidentNodes);
  gt::DeformParams bad;
  bad.alpha = 0;
  bad.beta = 0;
  EXPECT_EQ(code([&] { gt::deform(g, pull_arc(), bad); }), gt::ErrorCode::InvalidArgument);
}

TEST(Deform, ZeroIterationsReturnsTargetItself) {
  gt::DeformParams p;
  p.max_iterations = 0;
  const auto g = arc();
  const auto out = gt::deform(g, pull_arc(), p);
  EXPECT_EQ(std::memcmp(out.positions().data(), g.positions().data(), sizeof(gt::Point) * g.size()), 0);
}
