#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "graphtune/error.hpp"
#include "graphtune/geometry.hpp"
#include "graphtune/graph.hpp"
#include "graphtune/io.hpp"

namespace graphtune {

namespace detail {

constexpr double kCollinearEps = 1e-12;

inline int orientation(const Point& a, const Point& b, const Point& c) {
  const double v = cross(b - a, c - a);
  if (v > kCollinearEps) return 1;
  if (v < -kCollinearEps) return -1;
  return 0;
}

}  // namespace detail

/// True when the open segments cross at a single interior point. Touching,
/// collinear overlap and shared endpoints do not count.
inline bool segments_cross(const Point& p1, const Point& p2, const Point& q1, const Point& q2) {
  const int o1 = detail::orientation(p1, p2, q1);
  const int o2 = detail::orientation(p1, p2, q2);
  const int o3 = detail::orientation(q1, q2, p1);
  const int o4 = detail::orientation(q1, q2, p2);
  return o1 * o2 < 0 && o3 * o4 < 0;
}

inline std::size_t crossing_count(const Graph& g) {
  std::size_t c = 0;
  const auto& edges = g.edges();
  for (std::size_t a = 0; a < edges.size(); ++a) {
    for (std::size_t b = a + 1; b < edges.size(); ++b) {
      const auto& e = edges[a];
      const auto& f = edges[b];
      if (e.u == f.u || e.u == f.v || e.v == f.u || e.v == f.v) continue;
      if (segments_cross(g.position(e.u), g.position(e.v), g.position(f.u), g.position(f.v))) ++c;
    }
  }
  return c;
}

/// 1 - sqrt(c / c_max), with c_max the number of edge pairs that share no
/// endpoint. 1 when no such pair exists.
inline double crosslessness(const Graph& g) {
  const double m = static_cast<double>(g.edge_count());
  double adjacent = 0.0;
  for (NodeIndex v = 0; v < g.size(); ++v) {
    const double d = static_cast<double>(g.degree(v));
    adjacent += d * (d - 1.0);
  }
  const double c_max = m * (m - 1.0) / 2.0 - adjacent / 2.0;
  if (c_max <= 0.0) return 1.0;
  return 1.0 - std::sqrt(static_cast<double>(crossing_count(g)) / c_max);
}

/// Smallest angular gap between consecutive incident edges at v, in radians.
/// A single incident edge leaves the full turn.
inline double minimum_incident_angle(const Graph& g, NodeIndex v) {
  std::vector<double> angles;
  for (const auto w : g.neighbors(v)) {
    const Point d = g.position(w) - g.position(v);
    angles.push_back(std::atan2(d.y, d.x));
  }
  if (angles.size() < 2) return 2.0 * std::numbers::pi;
  std::sort(angles.begin(), angles.end());
  double best = angles.front() + 2.0 * std::numbers::pi - angles.back();
  for (std::size_t k = 1; k < angles.size(); ++k) best = std::min(best, angles[k] - angles[k - 1]);
  return best;
}

/// 1 - mean over non-isolated nodes of |ideal - min| / ideal, where the ideal
/// angle is a full turn divided by the degree.
inline double minimum_angle_metric(const Graph& g) {
  double sum = 0.0;
  std::size_t counted = 0;
  for (NodeIndex v = 0; v < g.size(); ++v) {
    const auto deg = g.degree(v);
    if (deg == 0) continue;
    const double ideal = 2.0 * std::numbers::pi / static_cast<double>(deg);
    sum += std::abs((ideal - minimum_incident_angle(g, v)) / ideal);
    ++counted;
  }
  if (counted == 0) return 1.0;
  return 1.0 - sum / static_cast<double>(counted);
}

/// Coefficient of variation of edge lengths divided by sqrt(|E| - 1).
/// Zero for fewer than two edges.
inline double edge_length_variation(const Graph& g) {
  const auto m = g.edge_count();
  if (m < 2) return 0.0;
  std::vector<double> len;
  len.reserve(m);
  for (const auto& e : g.edges()) len.push_back(edge_length(g, e));
  double mean = 0.0;
  for (const double l : len) mean += l;
  mean /= static_cast<double>(m);
  if (!(mean > 0.0)) return 0.0;
  double var = 0.0;
  for (const double l : len) var += (l - mean) * (l - mean);
  var /= static_cast<double>(m);
  return std::sqrt(var) / mean / std::sqrt(static_cast<double>(m) - 1.0);
}

/// Gabriel graph neighbourhoods: i and j are adjacent when no third point
/// lies strictly inside the circle with diameter ij.
inline std::vector<std::vector<NodeIndex>> gabriel_neighbors(const std::vector<Point>& pts) {
  const auto n = pts.size();
  std::vector<std::vector<NodeIndex>> adj(n);
  for (NodeIndex i = 0; i < n; ++i) {
    for (NodeIndex j = i + 1; j < n; ++j) {
      bool empty = true;
      for (NodeIndex k = 0; k < n && empty; ++k) {
        if (k == i || k == j) continue;
        // Inside the diametral circle exactly when the angle ikj is obtuse.
        if (dot(pts[i] - pts[k], pts[j] - pts[k]) < 0.0) empty = false;
      }
      if (empty) {
        adj[i].push_back(j);
        adj[j].push_back(i);
      }
    }
  }
  return adj;
}

/// Mean Jaccard similarity of each node's Gabriel-graph neighbourhood in the
/// two layouts. Nodes are matched by id.
inline double shape_based_metric(const Graph& before, const Graph& after) {
  if (before.size() != after.size()) throw Error(ErrorCode::NodeSetMismatch, "layouts differ in node count");
  if (before.empty()) return 1.0;
  std::vector<Point> pa = before.positions();
  std::vector<Point> pb(before.size());
  for (NodeIndex i = 0; i < before.size(); ++i) {
    const auto k = after.index_of(before.id(i));
    if (!k) throw Error(ErrorCode::NodeSetMismatch, "layouts differ in node ids");
    pb[i] = after.position(*k);
  }
  const auto ga = gabriel_neighbors(pa);
  const auto gb = gabriel_neighbors(pb);
  double total = 0.0;
  for (NodeIndex i = 0; i < before.size(); ++i) {
    const std::set<NodeIndex> a(ga[i].begin(), ga[i].end());
    const std::set<NodeIndex> b(gb[i].begin(), gb[i].end());
    std::size_t common = 0;
    for (const auto x : a) common += b.count(x);
    const std::size_t uni = a.size() + b.size() - common;
    total += uni == 0 ? 1.0 : static_cast<double>(common) / static_cast<double>(uni);
  }
  return total / static_cast<double>(before.size());
}

struct ReadabilityScores {
  double crosslessness = 1.0;
  double minimum_angle = 1.0;
  double edge_length_variation = 0.0;
};

inline ReadabilityScores readability(const Graph& g) {
  return {crosslessness(g), minimum_angle_metric(g), edge_length_variation(g)};
}

struct ReadabilityReport {
  ReadabilityScores before;
  ReadabilityScores after;
  /// after - before, per metric.
  ReadabilityScores delta;
  double shape_based = 1.0;
};

inline ReadabilityReport readability_report(const Graph& before, const Graph& after) {
  ReadabilityReport r;
  r.shape_based = shape_based_metric(before, after);
  r.before = readability(before);
  r.after = readability(after);
  r.delta = {r.after.crosslessness - r.before.crosslessness, r.after.minimum_angle - r.before.minimum_angle,
             r.after.edge_length_variation - r.before.edge_length_variation};
  return r;
}

inline json scores_to_json(const ReadabilityScores& s) {
  return {{"crosslessness", s.crosslessness},
          {"minimum_angle", s.minimum_angle},
          {"edge_length_variation", s.edge_length_variation}};
}

/// {"before":{...},"after":{...},"delta":{...},"shape_based":x}
inline json report_to_json(const ReadabilityReport& r) {
  return {{"before", scores_to_json(r.before)},
          {"after", scores_to_json(r.after)},
          {"delta", scores_to_json(r.delta)},
          {"shape_based", r.shape_based}};
}

}  // namespace graphtune
