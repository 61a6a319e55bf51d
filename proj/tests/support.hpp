#pragma once

// Shared graph builders and random generators for the test suites.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "graphtune/graph.hpp"

namespace graphtune::testing {

inline std::string node_name(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "n%03zu", i);
  return buf;
}

inline Graph make_graph(const std::vector<Point>& pts, const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                        const std::string& prefix = "n") {
  std::vector<Node> nodes;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%s%03zu", prefix.c_str(), i);
    nodes.push_back({buf, pts[i]});
  }
  std::vector<Edge> es;
  for (const auto& [a, b] : edges) es.push_back({a, b});
  return Graph(std::move(nodes), std::move(es));
}

inline Graph path_graph(std::size_t n, double spacing = 1.0) {
  std::vector<Point> pts;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < n; ++i) {
    pts.push_back({spacing * static_cast<double>(i), 0.0});
    if (i) edges.emplace_back(i - 1, i);
  }
  return make_graph(pts, edges);
}

inline Graph cycle_graph(std::size_t n, double radius = 1.0) {
  std::vector<Point> pts;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    pts.push_back({radius * std::cos(a), radius * std::sin(a)});
    edges.emplace_back(i, (i + 1) % n);
  }
  return make_graph(pts, edges);
}

/// Star with centre 0 and `leaves` evenly spaced leaves.
inline Graph star_graph(std::size_t leaves) {
  std::vector<Point> pts{{0.0, 0.0}};
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < leaves; ++i) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(leaves);
    pts.push_back({std::cos(a), std::sin(a)});
    edges.emplace_back(0, i + 1);
  }
  return make_graph(pts, edges);
}

inline std::vector<Point> random_points(std::size_t n, std::mt19937_64& rng, double extent = 10.0) {
  std::uniform_real_distribution<double> u(0.0, extent);
  std::vector<Point> pts(n);
  for (auto& p : pts) p = {u(rng), u(rng)};
  return pts;
}

/// Erdos-Renyi G(n, p) edges (may be disconnected).
inline std::vector<std::pair<std::size_t, std::size_t>> random_edges(std::size_t n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (coin(rng)) edges.emplace_back(i, j);
    }
  }
  return edges;
}

/// Random spanning tree plus `extra` random chords: always connected.
inline std::vector<std::pair<std::size_t, std::size_t>> random_connected_edges(std::size_t n, std::size_t extra,
                                                                              std::mt19937_64& rng) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 1; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> parent(0, i - 1);
    edges.emplace_back(parent(rng), i);
  }
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (std::size_t k = 0; k < extra; ++k) {
    const auto a = pick(rng);
    const auto b = pick(rng);
    if (a != b) edges.emplace_back(std::min(a, b), std::max(a, b));
  }
  return edges;
}

inline Graph random_graph(std::size_t n, double p, std::mt19937_64& rng) {
  return make_graph(random_points(n, rng), random_edges(n, p, rng));
}

inline Graph random_connected_graph(std::size_t n, std::size_t extra, std::mt19937_64& rng) {
  return make_graph(random_points(n, rng), random_connected_edges(n, extra, rng));
}

/// Copy of g with nodes renamed through a random permutation and stored in a
/// shuffled order. `truth[i]` is the new id of g's node i.
struct Relabelled {
  Graph graph;
  std::vector<std::string> truth;
};

inline Relabelled relabel(const Graph& g, std::mt19937_64& rng, const std::string& prefix = "t") {
  const auto n = g.size();
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  // perm[k] = old index stored at new slot k
  std::vector<std::size_t> slot(n);
  for (std::size_t k = 0; k < n; ++k) slot[perm[k]] = k;
  std::vector<Node> nodes(n);
  std::vector<std::string> truth(n);
  for (std::size_t k = 0; k < n; ++k) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%s%03zu", prefix.c_str(), k);
    nodes[k] = {buf, g.position(perm[k])};
    truth[perm[k]] = buf;
  }
  std::vector<Edge> edges;
  for (const auto& e : g.edges()) edges.push_back({slot[e.u], slot[e.v]});
  return {Graph(std::move(nodes), std::move(edges)), std::move(truth)};
}

}  // namespace graphtune::testing
