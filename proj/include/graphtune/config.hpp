#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>

#include "graphtune/correspondence.hpp"
#include "graphtune/deform.hpp"
#include "graphtune/embedding.hpp"
#include "graphtune/io.hpp"
#include "graphtune/merge.hpp"
#include "graphtune/retrieval.hpp"
#include "graphtune/transfer.hpp"

namespace graphtune {

struct PipelineConfig {
  EmbeddingConfig embedding;
  RetrievalParams retrieval;
  DeformParams deform;
  FilterParams filter;
  /// merge.deform is kept equal to `deform`.
  MergeParams merge;
  /// Also paste the exemplar's own modification into the output. Off by
  /// default: with nothing retrieved the output equals the input.
  bool include_exemplar = false;
  MatchRadiusPolicy match;
  /// Weight of the degree term in the built-in matcher.
  double match_lambda = 0.25;
  /// Embedding cache file; empty disables caching.
  std::string embedding_cache;
  std::uint64_t seed = 0;

  void validate() const {
    embedding.validate();
    retrieval.validate();
    deform.validate();
    filter.validate();
    match.validate();
    if (merge.d && !(*merge.d > 0.0)) throw Error(ErrorCode::InvalidArgument, "merge.d must be positive");
    if (!(match_lambda >= 0.0)) throw Error(ErrorCode::InvalidArgument, "match.lambda must be non-negative");
  }
};

namespace detail {

inline void reject_unknown(const json& obj, std::string_view where, std::initializer_list<std::string_view> known) {
  if (!obj.is_object()) throw Error(ErrorCode::InvalidArgument, std::string(where) + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const auto k : known) ok = ok || key == k;
    if (!ok) throw Error(ErrorCode::InvalidArgument, "unknown config key '" + std::string(where) + "." + key + "'");
  }
}

template <typename T>
void read_into(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

}  // namespace detail

inline PipelineConfig config_from_json(const json& doc) {
  PipelineConfig c;
  try {
    detail::reject_unknown(doc, "config", {"embedding", "retrieval", "deform", "filter", "merge", "match", "seed"});
    if (doc.contains("embedding")) {
      detail::reject_unknown(doc["embedding"], "embedding", {"scales", "sample_count", "sample_max", "cache"});
      c.embedding = embedding_config_from_json(doc["embedding"]);
      detail::read_into(doc["embedding"], "cache", c.embedding_cache);
    }
    if (doc.contains("retrieval")) {
      const auto& r = doc["retrieval"];
      detail::reject_unknown(r, "retrieval", {"k", "min", "max", "epsilon", "wl_iterations"});
      detail::read_into(r, "k", c.retrieval.k);
      if (r.contains("min") && !r["min"].is_null()) c.retrieval.min_count = r["min"].get<int>();
      if (r.contains("max") && !r["max"].is_null()) c.retrieval.max_count = r["max"].get<int>();
      detail::read_into(r, "epsilon", c.retrieval.epsilon);
      detail::read_into(r, "wl_iterations", c.retrieval.wl_iterations);
    }
    if (doc.contains("deform")) {
      const auto& d = doc["deform"];
      detail::reject_unknown(d, "deform",
                             {"alpha", "beta", "gamma", "w", "max_iterations", "convergence_tol", "full_pair_limit"});
      detail::read_into(d, "alpha", c.deform.alpha);
      detail::read_into(d, "beta", c.deform.beta);
      detail::read_into(d, "gamma", c.deform.gamma);
      detail::read_into(d, "w", c.deform.w);
      detail::read_into(d, "max_iterations", c.deform.max_iterations);
      detail::read_into(d, "convergence_tol", c.deform.convergence_tol);
      detail::read_into(d, "full_pair_limit", c.deform.full_pair_limit);
    }
    if (doc.contains("filter")) {
      detail::reject_unknown(doc["filter"], "filter", {"r_u", "r_d"});
      detail::read_into(doc["filter"], "r_u", c.filter.r_u);
      detail::read_into(doc["filter"], "r_d", c.filter.r_d);
    }
    if (doc.contains("merge")) {
      const auto& m = doc["merge"];
      detail::reject_unknown(m, "merge", {"d", "mode", "include_exemplar"});
      detail::read_into(m, "include_exemplar", c.include_exemplar);
      if (m.contains("d") && !m["d"].is_null()) c.merge.d = m["d"].get<double>();
      if (m.contains("mode")) {
        const auto mode = m["mode"].get<std::string>();
        if (mode == "euclidean") {
          c.merge.mode = SurroundingsDistance::Euclidean;
        } else if (mode == "geodesic") {
          c.merge.mode = SurroundingsDistance::Geodesic;
        } else {
          throw Error(ErrorCode::InvalidArgument, "merge.mode must be 'euclidean' or 'geodesic'");
        }
      }
    }
    if (doc.contains("match")) {
      detail::reject_unknown(doc["match"], "match", {"radius_factor", "max_rounds", "lambda"});
      detail::read_into(doc["match"], "radius_factor", c.match.radius_factor);
      detail::read_into(doc["match"], "max_rounds", c.match.max_rounds);
      detail::read_into(doc["match"], "lambda", c.match_lambda);
    }
    detail::read_into(doc, "seed", c.seed);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("bad config value: ") + e.what());
  }
  c.merge.deform = c.deform;
  c.validate();
  return c;
}

inline PipelineConfig parse_config(std::string_view text) { return config_from_json(detail::parse_json(text)); }

inline json config_to_json(const PipelineConfig& c) {
  json embedding = embedding_config_to_json(c.embedding);
  if (!c.embedding_cache.empty()) embedding["cache"] = c.embedding_cache;
  json retrieval = {{"k", c.retrieval.k}, {"epsilon", c.retrieval.epsilon}, {"wl_iterations", c.retrieval.wl_iterations}};
  retrieval["min"] = c.retrieval.min_count ? json(*c.retrieval.min_count) : json(nullptr);
  retrieval["max"] = c.retrieval.max_count ? json(*c.retrieval.max_count) : json(nullptr);
  json merge = {{"mode", c.merge.mode == SurroundingsDistance::Euclidean ? "euclidean" : "geodesic"},
                {"include_exemplar", c.include_exemplar}};
  merge["d"] = c.merge.d ? json(*c.merge.d) : json(nullptr);
  return {{"embedding", embedding},
          {"retrieval", retrieval},
          {"deform",
           {{"alpha", c.deform.alpha},
            {"beta", c.deform.beta},
            {"gamma", c.deform.gamma},
            {"w", c.deform.w},
            {"max_iterations", c.deform.max_iterations},
            {"convergence_tol", c.deform.convergence_tol},
            {"full_pair_limit", c.deform.full_pair_limit}}},
          {"filter", {{"r_u", c.filter.r_u}, {"r_d", c.filter.r_d}}},
          {"merge", merge},
          {"match", {{"radius_factor", c.match.radius_factor}, {"max_rounds", c.match.max_rounds}, {"lambda", c.match_lambda}}},
          {"seed", c.seed}};
}

}  // namespace graphtune
