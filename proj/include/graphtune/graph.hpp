#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "graphtune/error.hpp"
#include "graphtune/geometry.hpp"

namespace graphtune {

using NodeIndex = std::size_t;

struct Node {
  std::string id;
  Point pos;

  friend bool operator==(const Node&, const Node&) = default;
};

/// Undirected edge stored by node index with u < v.
struct Edge {
  NodeIndex u = 0;
  NodeIndex v = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Simple undirected graph with a 2D layout. Immutable once built: layout
/// changes produce a new Graph through with_positions().
class Graph {
 public:
  Graph() = default;

  /// Builds from id-keyed edges. Duplicate edges (either orientation) are
  /// collapsed and self-loops dropped.
  Graph(std::vector<Node> nodes,
        const std::vector<std::pair<std::string, std::string>>& edges)
      : nodes_(std::move(nodes)) {
    index_nodes();
    std::vector<Edge> idx;
    idx.reserve(edges.size());
    for (const auto& [a, b] : edges) {
      const auto ia = index_of(a);
      const auto ib = index_of(b);
      if (!ia || !ib) {
        throw Error(ErrorCode::DanglingEndpoint,
                    "edge (" + a + ", " + b + ") references an undefined node");
      }
      idx.push_back({*ia, *ib});
    }
    set_edges(std::move(idx));
  }

  Graph(std::vector<Node> nodes, std::vector<Edge> edges) : nodes_(std::move(nodes)) {
    index_nodes();
    for (const auto& e : edges) {
      if (e.u >= nodes_.size() || e.v >= nodes_.size()) {
        throw Error(ErrorCode::DanglingEndpoint, "edge endpoint index out of range");
      }
    }
    set_edges(std::move(edges));
  }

  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }
  std::size_t edge_count() const { return edges_.size(); }

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Node& node(NodeIndex i) const { return nodes_[i]; }
  const std::string& id(NodeIndex i) const { return nodes_[i].id; }
  const Point& position(NodeIndex i) const { return nodes_[i].pos; }
  const std::vector<NodeIndex>& neighbors(NodeIndex i) const { return adjacency_[i]; }
  std::size_t degree(NodeIndex i) const { return adjacency_[i].size(); }

  std::optional<NodeIndex> index_of(const std::string& node_id) const {
    const auto it = index_.find(node_id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  NodeIndex require(const std::string& node_id) const {
    const auto i = index_of(node_id);
    if (!i) throw Error(ErrorCode::UnknownNode, "unknown node id '" + node_id + "'");
    return *i;
  }

  bool contains(const std::string& node_id) const { return index_.count(node_id) != 0; }

  bool has_edge(NodeIndex a, NodeIndex b) const {
    const auto& adj = adjacency_[a];
    return std::binary_search(adj.begin(), adj.end(), b);
  }

  std::vector<Point> positions() const {
    std::vector<Point> out;
    out.reserve(nodes_.size());
    for (const auto& n : nodes_) out.push_back(n.pos);
    return out;
  }

  Graph with_positions(const std::vector<Point>& pts) const {
    if (pts.size() != nodes_.size()) {
      throw Error(ErrorCode::NodeSetMismatch, "position count does not match node count");
    }
    Graph g = *this;
    for (std::size_t i = 0; i < pts.size(); ++i) g.nodes_[i].pos = pts[i];
    g.check_finite();
    return g;
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
  }

 private:
  void index_nodes() {
    index_.reserve(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (!index_.emplace(nodes_[i].id, i).second) {
        throw Error(ErrorCode::DuplicateId, "duplicate node id '" + nodes_[i].id + "'");
      }
    }
    check_finite();
  }

  void check_finite() const {
    for (const auto& n : nodes_) {
      if (!std::isfinite(n.pos.x) || !std::isfinite(n.pos.y)) {
        throw Error(ErrorCode::NonFiniteCoordinate,
                    "node '" + n.id + "' has a non-finite coordinate");
      }
    }
  }

  void set_edges(std::vector<Edge> raw) {
    edges_.clear();
    edges_.reserve(raw.size());
    for (auto e : raw) {
      if (e.u == e.v) continue;
      if (e.u > e.v) std::swap(e.u, e.v);
      edges_.push_back(e);
    }
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    adjacency_.assign(nodes_.size(), {});
    for (const auto& e : edges_) {
      adjacency_[e.u].push_back(e.v);
      adjacency_[e.v].push_back(e.u);
    }
    for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
  }

  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<NodeIndex>> adjacency_;
  std::unordered_map<std::string, NodeIndex> index_;
};

/// A named subset of a graph's nodes. Edges are always derived by induction.
struct Structure {
  std::string graph;
  std::vector<std::string> nodes;

  friend bool operator==(const Structure&, const Structure&) = default;
};

/// Resolves a structure's node ids against g, rejecting unknown ids,
/// repeats and the empty set.
inline std::vector<NodeIndex> resolve(const Graph& g, const Structure& s) {
  if (s.nodes.empty()) throw Error(ErrorCode::InvalidArgument, "structure is empty");
  std::vector<NodeIndex> out;
  out.reserve(s.nodes.size());
  std::vector<char> seen(g.size(), 0);
  for (const auto& id : s.nodes) {
    const auto i = g.require(id);
    if (seen[i]) throw Error(ErrorCode::DuplicateId, "structure repeats node '" + id + "'");
    seen[i] = 1;
    out.push_back(i);
  }
  return out;
}

/// Subgraph on `members` (kept in the given order) with every edge of g whose
/// endpoints are both members. Positions are copied unchanged.
inline Graph induced_subgraph(const Graph& g, const std::vector<NodeIndex>& members) {
  std::vector<NodeIndex> local(g.size(), std::numeric_limits<NodeIndex>::max());
  std::vector<Node> nodes;
  nodes.reserve(members.size());
  for (std::size_t k = 0; k < members.size(); ++k) {
    local[members[k]] = k;
    nodes.push_back(g.node(members[k]));
  }
  std::vector<Edge> edges;
  for (const auto& e : g.edges()) {
    const auto a = local[e.u];
    const auto b = local[e.v];
    if (a != std::numeric_limits<NodeIndex>::max() && b != std::numeric_limits<NodeIndex>::max()) {
      edges.push_back({a, b});
    }
  }
  return Graph(std::move(nodes), std::move(edges));
}

inline Graph induced_subgraph(const Graph& g, const Structure& s) {
  return induced_subgraph(g, resolve(g, s));
}

/// Maximal connected node sets. Members within a component follow graph
/// order; components are ordered by their smallest member id.
inline std::vector<std::vector<NodeIndex>> connected_component_indices(const Graph& g) {
  std::vector<std::vector<NodeIndex>> comps;
  std::vector<char> seen(g.size(), 0);
  for (NodeIndex start = 0; start < g.size(); ++start) {
    if (seen[start]) continue;
    std::vector<NodeIndex> comp;
    std::vector<NodeIndex> stack{start};
    seen[start] = 1;
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      comp.push_back(v);
      for (const auto w : g.neighbors(v)) {
        if (!seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  auto smallest_id = [&](const std::vector<NodeIndex>& c) {
    std::string best = g.id(c.front());
    for (const auto i : c) best = std::min(best, g.id(i));
    return best;
  };
  std::vector<std::pair<std::string, std::size_t>> keys;
  keys.reserve(comps.size());
  for (std::size_t k = 0; k < comps.size(); ++k) keys.emplace_back(smallest_id(comps[k]), k);
  std::sort(keys.begin(), keys.end());
  std::vector<std::vector<NodeIndex>> ordered;
  ordered.reserve(comps.size());
  for (const auto& [key, k] : keys) ordered.push_back(std::move(comps[k]));
  return ordered;
}

inline std::vector<std::vector<std::string>> connected_components(const Graph& g) {
  std::vector<std::vector<std::string>> out;
  for (const auto& comp : connected_component_indices(g)) {
    std::vector<std::string> ids;
    ids.reserve(comp.size());
    for (const auto i : comp) ids.push_back(g.id(i));
    out.push_back(std::move(ids));
  }
  return out;
}

inline bool is_connected(const Graph& g) {
  return !g.empty() && connected_component_indices(g).size() == 1;
}

/// Hop distances from `source`; unreachable nodes get -1.
inline std::vector<int> bfs_distances(const Graph& g, NodeIndex source) {
  std::vector<int> dist(g.size(), -1);
  std::queue<NodeIndex> q;
  dist[source] = 0;
  q.push(source);
  while (!q.empty()) {
    const auto v = q.front();
    q.pop();
    for (const auto w : g.neighbors(v)) {
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        q.push(w);
      }
    }
  }
  return dist;
}

inline double edge_length(const Graph& g, const Edge& e) {
  return distance(g.position(e.u), g.position(e.v));
}

/// Mean length of the edges incident to v; 0 for isolated nodes.
inline double mean_adjacent_edge_length(const Graph& g, NodeIndex v) {
  const auto& adj = g.neighbors(v);
  if (adj.empty()) return 0.0;
  double total = 0.0;
  for (const auto w : adj) total += distance(g.position(v), g.position(w));
  return total / static_cast<double>(adj.size());
}

inline double max_edge_length(const Graph& g) {
  double best = 0.0;
  for (const auto& e : g.edges()) best = std::max(best, edge_length(g, e));
  return best;
}

inline double mean_edge_length(const Graph& g) {
  if (g.edges().empty()) return 0.0;
  double total = 0.0;
  for (const auto& e : g.edges()) total += edge_length(g, e);
  return total / static_cast<double>(g.edge_count());
}

}  // namespace graphtune
