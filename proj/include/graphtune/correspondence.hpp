#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "graphtune/alignment.hpp"
#include "graphtune/assignment.hpp"
#include "graphtune/embedding.hpp"
#include "graphtune/error.hpp"
#include "graphtune/graph.hpp"
#include "graphtune/pairs.hpp"

namespace graphtune {

struct FilterParams {
  double r_u = 0.5;  // minimum common-neighbour ratio
  double r_d = 2.0;  // maximum distance ratio

  void validate() const {
    if (!(r_u > 0.0 && r_u <= 1.0)) throw Error(ErrorCode::InvalidArgument, "r_u must lie in (0,1]");
    if (!(r_d > 0.0)) throw Error(ErrorCode::InvalidArgument, "r_d must be positive");
  }
};

/// Keeps a correspondence when its neighbourhoods agree and its endpoints are
/// close. With ns the images of c_s's neighbours and nt the neighbours of
/// c_t, a pair needs |ns ∩ nt| > |ns|*r_u or |ns ∩ nt| > |nt|*r_u, and then a
/// separation below r_d times the mean adjacent edge length on both sides.
/// Positions must already be aligned.
inline MarkerSet filter_correspondences(const Graph& source, const Graph& target, const CorrespondenceSet& c,
                                        const FilterParams& p = {}) {
  p.validate();
  validate_pairs(c.pairs, source, target);
  std::unordered_map<NodeIndex, NodeIndex> image;
  for (const auto& pair : c.pairs) image.emplace(source.require(pair.source), target.require(pair.target));

  MarkerSet out;
  for (const auto& pair : c.pairs) {
    const auto cs = source.require(pair.source);
    const auto ct = target.require(pair.target);
    std::unordered_set<NodeIndex> ns;
    for (const auto n : source.neighbors(cs)) {
      if (const auto it = image.find(n); it != image.end()) ns.insert(it->second);
    }
    const auto& nt = target.neighbors(ct);
    std::size_t nu = 0;
    for (const auto n : nt) nu += ns.count(n);
    const auto common = static_cast<double>(nu);
    if (!(common > static_cast<double>(ns.size()) * p.r_u || common > static_cast<double>(nt.size()) * p.r_u)) {
      continue;
    }
    const double ds = mean_adjacent_edge_length(source, cs);
    const double dt = mean_adjacent_edge_length(target, ct);
    const double d = distance(source.position(cs), target.position(ct));
    if (d < ds * p.r_d && d < dt * p.r_d) out.pairs.push_back(pair);
  }
  return out;
}

/// Built-in matcher: minimum-cost assignment over embedding distance plus
/// lambda times the normalized degree difference. Embeddings are taken per
/// structure in isolation.
///
/// Each of `seed_rounds` rounds then promotes the cheapest assigned pair not
/// yet seeded to a seed and re-solves with an added cost: the mean, over
/// seeds (a, b), of |hops(a, i) - hops(b, j)|. Symmetric structures such as
/// cycles give every node the same embedding; the seeds fix the rotation and
/// reflection there. Pairs come back ordered by ascending final cost.
inline CorrespondenceSet seeded_auto_match(const Graph& source, const Graph& target, const EmbeddingSet& emb_source,
                                           const EmbeddingSet& emb_target, double lambda = 0.25,
                                           int seed_rounds = 3) {
  if (source.empty() || target.empty()) throw Error(ErrorCode::EmptyGraph, "cannot match an empty structure");
  if (seed_rounds < 0) throw Error(ErrorCode::InvalidArgument, "seed-rounds must be >= 0");
  CostTable base(source.size(), target.size());
  for (NodeIndex i = 0; i < source.size(); ++i) {
    const auto& ei = emb_source.vector_of(source.id(i));
    const double di = static_cast<double>(source.degree(i));
    for (NodeIndex j = 0; j < target.size(); ++j) {
      const double dj = static_cast<double>(target.degree(j));
      const double deg = std::abs(di - dj) / std::max({di, dj, 1.0});
      base(i, j) = embedding_distance(ei, emb_target.vector_of(target.id(j))) + lambda * deg;
    }
  }
  CostTable table = base;
  auto assignment = hungarian_assign(table, Coverage::Full);

  // Unreachable nodes sit one hop beyond the farthest reachable one.
  auto hops = [](const Graph& g, NodeIndex from) {
    auto d = bfs_distances(g, from);
    const int far = static_cast<int>(g.size());
    for (auto& x : d) {
      if (x < 0) x = far;
    }
    return d;
  };
  std::vector<std::pair<NodeIndex, NodeIndex>> seeds;
  std::vector<std::vector<int>> hs, ht;
  for (int round = 0; round < seed_rounds; ++round) {
    std::optional<std::pair<NodeIndex, NodeIndex>> next;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& pr : assignment.pairs) {
      if (std::find(seeds.begin(), seeds.end(), pr) != seeds.end()) continue;
      if (table(pr.first, pr.second) < best) {
        best = table(pr.first, pr.second);
        next = pr;
      }
    }
    if (!next) break;
    seeds.push_back(*next);
    hs.push_back(hops(source, next->first));
    ht.push_back(hops(target, next->second));
    const double inv = 1.0 / static_cast<double>(seeds.size());
    for (NodeIndex i = 0; i < source.size(); ++i) {
      for (NodeIndex j = 0; j < target.size(); ++j) {
        double mismatch = 0.0;
        for (std::size_t k = 0; k < seeds.size(); ++k) mismatch += std::abs(hs[k][i] - ht[k][j]);
        table(i, j) = base(i, j) + inv * mismatch;
      }
    }
    assignment = hungarian_assign(table, Coverage::Full);
  }

  std::vector<std::pair<double, NodePair>> ranked;
  for (const auto& [i, j] : assignment.pairs) ranked.push_back({table(i, j), {source.id(i), target.id(j)}});
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  CorrespondenceSet out;
  for (auto& [cost, pair] : ranked) out.pairs.push_back(std::move(pair));
  return out;
}

/// Aligns the target onto the source using all correspondences, then
/// filters. If fewer than two pairs survive, the leading pairs of `c` (taken
/// as ranked by confidence) top the set up to two and `fallback` is set.
inline MarkerSet select_markers(const Graph& source, const Graph& target, const CorrespondenceSet& c,
                                const FilterParams& p = {}) {
  if (c.pairs.size() < 2) throw Error(ErrorCode::InvalidArgument, "marker selection needs two correspondences");
  MarkerSet all{c.pairs};
  AffineTransform align;
  try {
    align = fit_alignment(all, source, target);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::RankDeficient) throw;
  }
  const auto aligned = apply_transform(align, target);
  auto markers = filter_correspondences(source, aligned, c, p);
  if (markers.size() >= 2) return markers;
  for (const auto& pair : c.pairs) {
    if (markers.size() >= 2) break;
    if (std::find(markers.pairs.begin(), markers.pairs.end(), pair) == markers.pairs.end()) {
      markers.pairs.push_back(pair);
    }
  }
  markers.fallback = true;
  return markers;
}

}  // namespace graphtune
