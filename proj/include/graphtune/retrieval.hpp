#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "graphtune/embedding.hpp"
#include "graphtune/error.hpp"
#include "graphtune/graph.hpp"

namespace graphtune {

struct RetrievalParams {
  int k = 5;
  /// Unset bounds derive from the exemplar: half and twice its node count.
  std::optional<int> min_count;
  std::optional<int> max_count;
  double epsilon = 0.5;
  int wl_iterations = 3;

  void validate() const {
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
    if (min_count && *min_count < 1) throw Error(ErrorCode::InvalidArgument, "min must be >= 1");
    if (max_count && *max_count < 1) throw Error(ErrorCode::InvalidArgument, "max must be >= 1");
    if (min_count && max_count && *min_count > *max_count) {
      throw Error(ErrorCode::InvalidArgument, "min must not exceed max");
    }
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must lie in [0,1]");
    if (wl_iterations < 1) throw Error(ErrorCode::InvalidArgument, "wl-iterations must be >= 1");
  }

  /// Fills unset bounds for an exemplar of `exemplar_size` nodes.
  RetrievalParams resolved(std::size_t exemplar_size) const {
    RetrievalParams p = *this;
    const auto n = static_cast<int>(exemplar_size);
    if (!p.min_count) p.min_count = std::max(1, (n + 1) / 2);
    if (!p.max_count) p.max_count = std::max(*p.min_count, 2 * n);
    p.validate();
    return p;
  }
};

struct RankedSuggestion {
  Structure structure;
  double similarity = 0.0;
};

/// Cosine similarity of Weisfeiler-Lehman subtree-label count vectors,
/// concatenated over refinement rounds 0..iterations. Labels are shared
/// between the two graphs so equal subtrees map to equal features.
inline double wl_similarity(const Graph& a, const Graph& b, int iterations = 3) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::EmptyGraph, "WL similarity needs non-empty graphs");
  if (iterations < 0) throw Error(ErrorCode::InvalidArgument, "iterations must be >= 0");
  std::vector<int> la(a.size(), 0), lb(b.size(), 0);
  std::int64_t dot = 0, na = 0, nb = 0;

  auto accumulate = [&]() {
    std::unordered_map<int, std::int64_t> ca, cb;
    for (const int l : la) ++ca[l];
    for (const int l : lb) ++cb[l];
    for (const auto& [label, count] : ca) {
      na += count * count;
      if (const auto it = cb.find(label); it != cb.end()) dot += count * it->second;
    }
    for (const auto& [label, count] : cb) nb += count * count;
  };

  accumulate();
  for (int round = 0; round < iterations; ++round) {
    std::map<std::vector<int>, int> dictionary;
    auto relabel = [&](const Graph& g, const std::vector<int>& labels) {
      std::vector<int> next(g.size());
      std::vector<int> signature;
      for (NodeIndex v = 0; v < g.size(); ++v) {
        signature.assign(1, labels[v]);
        for (const auto w : g.neighbors(v)) signature.push_back(labels[w]);
        std::sort(signature.begin() + 1, signature.end());
        const auto [it, inserted] = dictionary.emplace(signature, static_cast<int>(dictionary.size()));
        next[v] = it->second;
      }
      return next;
    };
    la = relabel(a, la);
    lb = relabel(b, lb);
    accumulate();
  }
  // Integer counts keep the isomorphic case exactly 1.0.
  return static_cast<double>(dot) / std::sqrt(static_cast<double>(na) * static_cast<double>(nb));
}

/// Connected components of the candidate-induced subgraph whose size lies in
/// [min, max]. Member ids follow graph order.
inline std::vector<Structure> induce_candidate_substructures(const Graph& g,
                                                             const std::vector<std::string>& candidates,
                                                             int min_count, int max_count,
                                                             const std::string& graph_name = {}) {
  std::vector<char> mark(g.size(), 0);
  for (const auto& id : candidates) mark[g.require(id)] = 1;
  std::vector<NodeIndex> members;
  for (NodeIndex i = 0; i < g.size(); ++i) {
    if (mark[i]) members.push_back(i);
  }
  const auto sub = induced_subgraph(g, members);
  std::vector<Structure> out;
  for (const auto& comp : connected_component_indices(sub)) {
    const auto size = static_cast<int>(comp.size());
    if (size < min_count || size > max_count) continue;
    Structure s{graph_name, {}};
    for (const auto i : comp) s.nodes.push_back(sub.id(i));
    out.push_back(std::move(s));
  }
  return out;
}

inline std::vector<Structure> induce_candidate_substructures(const Graph& g,
                                                             const std::vector<std::string>& candidates,
                                                             const RetrievalParams& p) {
  if (!p.min_count || !p.max_count) {
    throw Error(ErrorCode::InvalidArgument, "min and max must be resolved before inducing candidates");
  }
  return induce_candidate_substructures(g, candidates, *p.min_count, *p.max_count);
}

/// k-NN over embeddings, then connected candidate structures, then WL
/// scoring against the exemplar. Structures sharing more than half their
/// nodes with the exemplar are dropped. Sorted by descending similarity,
/// ties broken by smallest member id.
inline std::vector<RankedSuggestion> retrieve_similar(const Graph& g, const Structure& exemplar,
                                                      const EmbeddingSet& emb, const RetrievalParams& params) {
  const auto ex_idx = resolve(g, exemplar);
  const auto p = params.resolved(ex_idx.size());
  const auto ex_graph = induced_subgraph(g, ex_idx);

  const auto candidates = knn_similar_nodes(emb, exemplar.nodes, p.k);
  auto structures = induce_candidate_substructures(g, candidates, *p.min_count, *p.max_count, exemplar.graph);

  const std::unordered_set<std::string> ex_set(exemplar.nodes.begin(), exemplar.nodes.end());
  std::vector<std::pair<RankedSuggestion, std::string>> scored;
  for (auto& s : structures) {
    const auto overlap = std::count_if(s.nodes.begin(), s.nodes.end(),
                                       [&](const std::string& id) { return ex_set.count(id) != 0; });
    if (2 * static_cast<std::size_t>(overlap) > s.nodes.size()) continue;
    const double sim = wl_similarity(induced_subgraph(g, s), ex_graph, p.wl_iterations);
    if (sim < p.epsilon) continue;
    const auto smallest = *std::min_element(s.nodes.begin(), s.nodes.end());
    scored.push_back({{std::move(s), sim}, smallest});
  }
  std::sort(scored.begin(), scored.end(), [](const auto& l, const auto& r) {
    if (l.first.similarity != r.first.similarity) return l.first.similarity > r.first.similarity;
    return l.second < r.second;
  });
  std::vector<RankedSuggestion> out;
  out.reserve(scored.size());
  for (auto& [s, key] : scored) out.push_back(std::move(s));
  return out;
}

}  // namespace graphtune
