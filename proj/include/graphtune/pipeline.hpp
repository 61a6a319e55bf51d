#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "graphtune/config.hpp"
#include "graphtune/correspondence.hpp"
#include "graphtune/embedding.hpp"
#include "graphtune/layout.hpp"
#include "graphtune/merge.hpp"
#include "graphtune/metrics.hpp"
#include "graphtune/retrieval.hpp"
#include "graphtune/transfer.hpp"

namespace graphtune {

struct TargetOutcome {
  Structure structure;
  double similarity = 0.0;
  MarkerSet markers;
  int rounds = 0;
  int deform_iterations = 0;
  double final_energy = 0.0;
  /// Set when the target was retrieved but not transferred.
  std::string skipped;
};

struct PipelineResult {
  Graph merged;
  std::vector<TargetOutcome> targets;
  ReadabilityReport report;
};

namespace detail {

// Runs `fn`, prefixing any library error with the stage name.
template <typename Fn>
auto staged(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), std::string(stage) + ": " + e.what());
  }
}

}  // namespace detail

/// Auto markers for a (source, target) pair: both are laid out from topology
/// alone, matched through per-structure embeddings and filtered there. A
/// topology-only layout is free up to reflection, so the target's is mirrored
/// when that fits the correspondences better.
inline MarkerSet auto_markers(const Graph& source, const Graph& target, const PipelineConfig& cfg) {
  LayoutOptions lo;
  lo.seed = cfg.seed;
  const auto s_ref = reference_layout(source, lo);
  auto t_ref = reference_layout(target, lo);
  const auto c = seeded_auto_match(s_ref, t_ref, compute_embeddings(s_ref, cfg.embedding),
                                   compute_embeddings(t_ref, cfg.embedding), cfg.match_lambda);
  auto mirrored_pts = t_ref.positions();
  for (auto& p : mirrored_pts) p.x = -p.x;
  const auto mirrored = t_ref.with_positions(mirrored_pts);
  auto residual = [&](const Graph& t) {
    std::vector<Point> sp, tp;
    for (const auto& p : c.pairs) {
      sp.push_back(s_ref.position(s_ref.require(p.source)));
      tp.push_back(t.position(t.require(p.target)));
    }
    try {
      return alignment_residual(fit_alignment(sp, tp), sp, tp);
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  if (residual(mirrored) < residual(t_ref)) t_ref = mirrored;
  return select_markers(s_ref, t_ref, c, cfg.filter);
}

/// Retrieves structures similar to `exemplar`, transfers the exemplar's
/// modification onto each, and merges the targets (and, if configured, the
/// exemplar itself) into `g`.
inline PipelineResult run_pipeline(const Graph& g, const Structure& exemplar, const Graph& modified_exemplar,
                                   const PipelineConfig& cfg) {
  cfg.validate();
  const auto members = detail::staged("input", [&] { return resolve(g, exemplar); });
  const auto source = induced_subgraph(g, members);
  const auto modified_source = detail::staged(
      "input", [&] { return source.with_positions(detail::modified_positions(g, members, modified_exemplar)); });

  const auto emb = detail::staged("embed", [&] { return cached_embeddings(g, cfg.embedding, cfg.embedding_cache); });
  const auto ranked = detail::staged("retrieve", [&] { return retrieve_similar(g, exemplar, emb, cfg.retrieval); });

  std::vector<char> taken(g.size(), 0);
  for (const auto m : members) taken[m] = 1;
  PipelineResult out;
  std::vector<ModifiedStructure> items;
  if (cfg.include_exemplar) items.push_back({exemplar, modified_source});
  for (const auto& r : ranked) {
    TargetOutcome t;
    t.structure = r.structure;
    t.similarity = r.similarity;
    const auto idx = resolve(g, r.structure);
    bool overlaps = false;
    for (const auto v : idx) overlaps = overlaps || taken[v];
    if (overlaps) {
      t.skipped = "overlaps the exemplar";
      out.targets.push_back(std::move(t));
      continue;
    }
    const auto target = induced_subgraph(g, idx);
    const std::string tag = "target " + std::to_string(out.targets.size());
    t.markers = detail::staged(("match " + tag).c_str(), [&] { return auto_markers(source, target, cfg); });
    const auto res = detail::staged(("transfer " + tag).c_str(), [&] {
      return transfer_modification(source, modified_source, target, t.markers, cfg.deform, cfg.match);
    });
    t.rounds = res.rounds;
    t.deform_iterations = res.deform_iterations;
    t.final_energy = res.final_energy;
    for (const auto v : idx) taken[v] = 1;
    items.push_back({r.structure, res.layout});
    out.targets.push_back(std::move(t));
  }
  MergeParams mp = cfg.merge;
  mp.deform = cfg.deform;
  out.merged = detail::staged("merge", [&] { return merge_all(g, items, mp); });
  out.report = detail::staged("metrics", [&] { return readability_report(g, out.merged); });
  return out;
}

/// {"targets":[...],"transferred":n,"report":{...}}
inline json pipeline_summary(const PipelineResult& r) {
  json targets = json::array();
  int transferred = 0;
  for (const auto& t : r.targets) {
    json item = {{"nodes", t.structure.nodes}, {"similarity", t.similarity}};
    if (!t.skipped.empty()) {
      item["skipped"] = t.skipped;
    } else {
      ++transferred;
      item["markers"] = pairs_to_json(t.markers.pairs)["pairs"];
      item["fallback"] = t.markers.fallback;
      item["rounds"] = t.rounds;
      item["deform_iterations"] = t.deform_iterations;
      item["final_energy"] = t.final_energy;
    }
    targets.push_back(std::move(item));
  }
  return {{"targets", std::move(targets)}, {"transferred", transferred}, {"report", report_to_json(r.report)}};
}

}  // namespace graphtune
