#pragma once

#include <algorithm>
#include <string>
#include <unordered_set>
#include <vector>

#include "graphtune/alignment.hpp"
#include "graphtune/assignment.hpp"
#include "graphtune/deform.hpp"
#include "graphtune/error.hpp"
#include "graphtune/graph.hpp"
#include "graphtune/pairs.hpp"

namespace graphtune {

struct MatchRadiusPolicy {
  /// Candidate radius as a multiple of the target node's mean edge length.
  double radius_factor = 2.0;
  /// Upper bound on align/deform/match rounds in one layout simulation.
  int max_rounds = 20;

  void validate() const {
    if (!(radius_factor > 0.0)) throw Error(ErrorCode::InvalidArgument, "radius-factor must be positive");
    if (max_rounds < 1) throw Error(ErrorCode::InvalidArgument, "max-rounds must be >= 1");
  }
};

/// Extends `existing` with pairs (source i, target j) where the two nodes lie
/// closer than radius_factor times j's mean adjacent edge length. The new
/// pairs form a maximum-cardinality, minimum-distance injective assignment
/// over nodes not already paired.
inline MarkerSet match_step(const Graph& source, const Graph& deformed_target, const MarkerSet& existing,
                            const MatchRadiusPolicy& policy = {}) {
  policy.validate();
  std::unordered_set<std::string> used_s, used_t;
  for (const auto& p : existing.pairs) {
    used_s.insert(p.source);
    used_t.insert(p.target);
  }
  std::vector<NodeIndex> free_t;
  std::vector<double> radius;
  for (NodeIndex j = 0; j < deformed_target.size(); ++j) {
    if (used_t.count(deformed_target.id(j))) continue;
    const double r = policy.radius_factor * mean_adjacent_edge_length(deformed_target, j);
    if (r > 0.0) {
      free_t.push_back(j);
      radius.push_back(r);
    }
  }
  std::vector<NodeIndex> rows;
  std::vector<NodeIndex> free_s;
  for (NodeIndex i = 0; i < source.size(); ++i) {
    if (!used_s.count(source.id(i))) free_s.push_back(i);
  }

  // Keep only rows and columns that have at least one candidate.
  std::vector<char> col_used(free_t.size(), 0);
  for (const auto i : free_s) {
    bool any = false;
    for (std::size_t c = 0; c < free_t.size(); ++c) {
      if (distance(source.position(i), deformed_target.position(free_t[c])) < radius[c]) {
        any = true;
        col_used[c] = 1;
      }
    }
    if (any) rows.push_back(i);
  }
  std::vector<std::size_t> cols;
  for (std::size_t c = 0; c < free_t.size(); ++c) {
    if (col_used[c]) cols.push_back(c);
  }

  MarkerSet out = existing;
  if (rows.empty() || cols.empty()) return out;
  CostTable table(rows.size(), cols.size(), CostTable::forbidden);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const double d = distance(source.position(rows[r]), deformed_target.position(free_t[cols[c]]));
      if (d < radius[cols[c]]) table(r, c) = d;
    }
  }
  for (const auto& [r, c] : hungarian_assign(table, Coverage::Maximal).pairs) {
    out.pairs.push_back({source.id(rows[r]), deformed_target.id(free_t[cols[c]])});
  }
  return out;
}

struct SimulationResult {
  /// Deformed target, expressed in the source frame.
  Graph layout;
  MarkerSet markers;
  /// Accumulated alignment: `layout` is a deformation of frame(target).
  AffineTransform frame;
  int rounds = 0;
  int deform_iterations = 0;
  double final_energy = 0.0;
};

/// Alternates align -> deform -> match until matching stops producing new
/// correspondences (or max_rounds is hit). The marker set only grows.
inline SimulationResult simulate_layout(const Graph& source, const Graph& target, const MarkerSet& markers,
                                        const DeformParams& params = {}, const MatchRadiusPolicy& policy = {}) {
  policy.validate();
  validate_pairs(markers.pairs, source, target);
  if (markers.size() < 2) throw Error(ErrorCode::InvalidArgument, "layout simulation needs at least two markers");

  SimulationResult res;
  res.layout = target;
  res.markers = markers;
  const auto coverable = std::min(source.size(), target.size());
  for (int round = 0; round < policy.max_rounds; ++round) {
    const auto align = fit_alignment(res.markers, source, res.layout);
    res.layout = apply_transform(align, res.layout);
    res.frame = compose(align, res.frame);

    std::vector<Anchor> anchors;
    anchors.reserve(res.markers.size());
    for (const auto& p : res.markers.pairs) {
      anchors.push_back({p.target, source.position(source.require(p.source))});
    }
    auto step = deform_with_trace(res.layout, anchors, params);
    res.layout = std::move(step.graph);
    res.deform_iterations += step.iterations;
    res.final_energy = step.final_terms.total;
    ++res.rounds;

    if (res.markers.size() >= coverable) break;
    auto grown = match_step(source, res.layout, res.markers, policy);
    if (grown.size() <= res.markers.size()) break;
    res.markers = std::move(grown);
  }
  return res;
}

struct TransferResult {
  /// Modified target in the target's original frame.
  Graph layout;
  /// Round-one output restored to the target's original frame.
  Graph simulated;
  MarkerSet markers;
  int rounds = 0;
  int deform_iterations = 0;
  double final_energy = 0.0;
};

/// Two rounds of layout simulation: first the target is reshaped to mimic the
/// source (growing the markers), then the source's modification is replayed
/// on the reshaped target through every marker, and the result is mapped
/// back into the target's own frame.
inline TransferResult transfer_modification(const Graph& source, const Graph& modified_source, const Graph& target,
                                            const MarkerSet& markers, const DeformParams& params = {},
                                            const MatchRadiusPolicy& policy = {}) {
  if (source.size() != modified_source.size()) {
    throw Error(ErrorCode::NodeSetMismatch, "source and modified source differ in node count");
  }
  for (const auto& n : source.nodes()) {
    if (!modified_source.contains(n.id)) {
      throw Error(ErrorCode::NodeSetMismatch, "modified source lacks node '" + n.id + "'");
    }
  }
  const auto first = simulate_layout(source, target, markers, params, policy);

  // Goals carry the modification as a displacement of each matched target
  // node, so an unmodified source leaves the round-one result untouched.
  std::vector<Point> goals, current;
  std::vector<Anchor> anchors;
  for (const auto& p : first.markers.pairs) {
    const auto si = source.require(p.source);
    const Point shift = modified_source.position(modified_source.require(p.source)) - source.position(si);
    const Point here = first.layout.position(first.layout.require(p.target));
    current.push_back(here);
    goals.push_back(here + shift);
  }
  const auto align = fit_alignment(goals, current);
  Graph second = apply_transform(align, first.layout);
  for (std::size_t k = 0; k < goals.size(); ++k) anchors.push_back({first.markers.pairs[k].target, goals[k]});
  auto step = deform_with_trace(second, anchors, params);

  // Anchored at the goals, the result already sits in the source frame; only
  // the round-one frame has to be undone.
  TransferResult out;
  const auto restore = invert_transform(first.frame);
  out.layout = apply_transform(restore, step.graph);
  out.simulated = apply_transform(restore, first.layout);
  out.markers = first.markers;
  out.rounds = first.rounds + 1;
  out.deform_iterations = first.deform_iterations + step.iterations;
  out.final_energy = step.final_terms.total;
  return out;
}

}  // namespace graphtune
