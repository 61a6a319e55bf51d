#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "graphtune/deform.hpp"
#include "graphtune/error.hpp"
#include "graphtune/graph.hpp"

namespace graphtune {

enum class SurroundingsDistance {
  /// Straight-line layout distance to the nearest structure node.
  Euclidean,
  /// Shortest-path length through the drawn edges.
  Geodesic,
};

struct MergeParams {
  /// Surroundings radius; defaults to the longest edge of the whole graph.
  std::optional<double> d;
  SurroundingsDistance mode = SurroundingsDistance::Euclidean;
  DeformParams deform;

  double radius(const Graph& g) const {
    const double r = d ? *d : max_edge_length(g);
    if (d && !(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "surroundings radius must be positive");
    return r;
  }
};

namespace detail {

inline std::vector<double> distance_to_set(const Graph& g, const std::vector<NodeIndex>& members,
                                           SurroundingsDistance mode) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(g.size(), inf);
  if (mode == SurroundingsDistance::Euclidean) {
    for (NodeIndex v = 0; v < g.size(); ++v) {
      for (const auto m : members) dist[v] = std::min(dist[v], distance(g.position(v), g.position(m)));
    }
    return dist;
  }
  using Item = std::pair<double, NodeIndex>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (const auto m : members) {
    dist[m] = 0.0;
    heap.push({0.0, m});
  }
  while (!heap.empty()) {
    const auto [dv, v] = heap.top();
    heap.pop();
    if (dv > dist[v]) continue;
    for (const auto w : g.neighbors(v)) {
      const double nd = dv + distance(g.position(v), g.position(w));
      if (nd < dist[w]) {
        dist[w] = nd;
        heap.push({nd, w});
      }
    }
  }
  return dist;
}

inline std::vector<NodeIndex> surroundings_indices(const Graph& g, const std::vector<NodeIndex>& members, double d,
                                                   SurroundingsDistance mode) {
  std::vector<char> in(g.size(), 0);
  for (const auto m : members) in[m] = 1;
  const auto dist = distance_to_set(g, members, mode);
  std::vector<NodeIndex> out;
  for (NodeIndex v = 0; v < g.size(); ++v) {
    if (!in[v] && dist[v] < d) out.push_back(v);
  }
  return out;
}

}  // namespace detail

/// Nodes outside s whose distance to the nearest node of s is below d.
inline Structure surroundings(const Graph& g, const Structure& s, double d,
                              SurroundingsDistance mode = SurroundingsDistance::Euclidean) {
  Structure out{s.graph, {}};
  for (const auto v : detail::surroundings_indices(g, resolve(g, s), d, mode)) out.nodes.push_back(g.id(v));
  return out;
}

/// A structure together with the new positions of its nodes.
struct ModifiedStructure {
  Structure structure;
  Graph modified;
};

namespace detail {

inline std::vector<Point> modified_positions(const Graph& g, const std::vector<NodeIndex>& members,
                                             const Graph& modified) {
  if (modified.size() != members.size()) {
    throw Error(ErrorCode::NodeSetMismatch, "modified layout must cover exactly the structure's nodes");
  }
  std::vector<Point> pts;
  pts.reserve(members.size());
  for (const auto m : members) {
    const auto k = modified.index_of(g.id(m));
    if (!k) throw Error(ErrorCode::NodeSetMismatch, "modified layout lacks node '" + g.id(m) + "'");
    pts.push_back(modified.position(*k));
  }
  return pts;
}

// One joint solve for a set of structures: structure nodes are pinned to their
// new positions, surroundings are free, and a frame of nodes just beyond the
// surroundings is pinned in place so the transition stays smooth.
inline Graph merge_jointly(const Graph& g, const std::vector<std::pair<std::vector<NodeIndex>, std::vector<Point>>>& parts,
                           const MergeParams& p) {
  const double d = p.radius(g);
  std::vector<char> role(g.size(), 0);  // 1 structure, 2 surroundings, 3 frame
  std::vector<Point> out = g.positions();
  std::vector<NodeIndex> fixed;
  for (const auto& [members, pts] : parts) {
    for (std::size_t k = 0; k < members.size(); ++k) {
      role[members[k]] = 1;
      out[members[k]] = pts[k];
      fixed.push_back(members[k]);
    }
  }
  std::vector<NodeIndex> sur;
  if (d > 0.0) {
    for (const auto v : surroundings_indices(g, fixed, d, p.mode)) {
      role[v] = 2;
      sur.push_back(v);
    }
  }
  if (sur.empty()) return g.with_positions(out);
  for (const auto v : surroundings_indices(g, sur, d, p.mode)) {
    if (role[v] == 0) role[v] = 3;
  }

  std::vector<NodeIndex> members;
  for (NodeIndex v = 0; v < g.size(); ++v) {
    if (role[v]) members.push_back(v);
  }
  const Graph local = induced_subgraph(g, members);
  std::vector<Anchor> anchors;
  for (const auto v : members) {
    if (role[v] == 1) anchors.push_back({g.id(v), out[v]});
    if (role[v] == 3) anchors.push_back({g.id(v), g.position(v)});
  }
  const auto solved = deform_with_trace(local, anchors, p.deform);
  for (std::size_t k = 0; k < members.size(); ++k) {
    if (role[members[k]] == 2) out[members[k]] = solved.graph.position(k);
  }
  return g.with_positions(out);
}

}  // namespace detail

/// Pastes `modified` into g and re-optimizes the surroundings of s with the
/// deformation solver. Nodes of s land exactly on their new positions; nodes
/// outside s and its surroundings keep their positions bit for bit.
inline Graph merge_with_optimization(const Graph& g, const Structure& s, const Graph& modified,
                                     const MergeParams& p = {}) {
  const auto members = resolve(g, s);
  return detail::merge_jointly(g, {{members, detail::modified_positions(g, members, modified)}}, p);
}

/// Merges several structures in the given order. Structures whose
/// structure-plus-surroundings regions overlap are solved in one system.
inline Graph merge_all(const Graph& g, const std::vector<ModifiedStructure>& items, const MergeParams& p = {}) {
  const double d = p.radius(g);
  const auto n = items.size();
  std::vector<std::vector<NodeIndex>> members(n);
  std::vector<std::vector<char>> region(n, std::vector<char>(g.size(), 0));
  for (std::size_t k = 0; k < n; ++k) {
    members[k] = resolve(g, items[k].structure);
    for (const auto v : members[k]) region[k][v] = 1;
    if (d > 0.0) {
      for (const auto v : detail::surroundings_indices(g, members[k], d, p.mode)) region[k][v] = 1;
    }
  }
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      for (NodeIndex v = 0; v < g.size(); ++v) {
        if (region[a][v] && region[b][v]) {
          parent[find(b)] = find(a);
          break;
        }
      }
    }
  }
  // Later groups see a partly merged graph; keep the radius of the input.
  MergeParams fixed_radius = p;
  if (!fixed_radius.d && d > 0.0) fixed_radius.d = d;
  Graph current = g;
  std::vector<char> done(n, 0);
  for (std::size_t a = 0; a < n; ++a) {
    if (done[a]) continue;
    std::vector<std::pair<std::vector<NodeIndex>, std::vector<Point>>> parts;
    for (std::size_t b = a; b < n; ++b) {
      if (find(b) != find(a)) continue;
      done[b] = 1;
      parts.emplace_back(members[b], detail::modified_positions(current, members[b], items[b].modified));
    }
    current = detail::merge_jointly(current, parts, fixed_radius);
  }
  return current;
}

/// Overwrites the structure's positions with no smoothing at all.
inline Graph naive_paste(const Graph& g, const Structure& s, const Graph& modified) {
  const auto members = resolve(g, s);
  const auto pts = detail::modified_positions(g, members, modified);
  auto out = g.positions();
  for (std::size_t k = 0; k < members.size(); ++k) out[members[k]] = pts[k];
  return g.with_positions(out);
}

}  // namespace graphtune
