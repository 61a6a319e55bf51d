#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "graphtune/error.hpp"
#include "graphtune/graph.hpp"
#include "graphtune/io.hpp"

namespace graphtune {

/// Heat-wavelet structural embedding settings.
struct EmbeddingConfig {
  std::vector<double> scales{0.5, 1.0};
  int sample_count = 25;
  double sample_max = 10.0;

  std::size_t dimension() const { return 2 * static_cast<std::size_t>(sample_count) * scales.size(); }

  void validate() const {
    if (scales.empty()) throw Error(ErrorCode::InvalidArgument, "embedding needs at least one scale");
    for (const double s : scales) {
      if (!(s > 0.0) || !std::isfinite(s)) throw Error(ErrorCode::InvalidArgument, "scales must be positive");
    }
    if (sample_count < 2) throw Error(ErrorCode::InvalidArgument, "sample-count must be >= 2");
    if (!(sample_max > 0.0)) throw Error(ErrorCode::InvalidArgument, "sample-max must be positive");
  }

  /// Evenly spaced abscissae in (0, sample_max].
  std::vector<double> sample_points() const {
    std::vector<double> t(static_cast<std::size_t>(sample_count));
    for (int k = 0; k < sample_count; ++k) t[static_cast<std::size_t>(k)] = sample_max * (k + 1) / sample_count;
    return t;
  }

  friend bool operator==(const EmbeddingConfig&, const EmbeddingConfig&) = default;
};

class EmbeddingSet {
 public:
  EmbeddingSet() = default;
  EmbeddingSet(std::vector<std::string> ids, std::vector<std::vector<double>> vectors)
      : ids_(std::move(ids)), vectors_(std::move(vectors)) {
    if (ids_.size() != vectors_.size()) {
      throw Error(ErrorCode::InvalidArgument, "embedding ids and vectors differ in length");
    }
    for (std::size_t i = 0; i < ids_.size(); ++i) {
      if (vectors_[i].size() != vectors_.front().size()) {
        throw Error(ErrorCode::InvalidArgument, "embedding vectors differ in dimension");
      }
      index_.emplace(ids_[i], i);
    }
  }

  std::size_t size() const { return ids_.size(); }
  std::size_t dimension() const { return vectors_.empty() ? 0 : vectors_.front().size(); }
  const std::vector<std::string>& node_ids() const { return ids_; }
  const std::vector<std::vector<double>>& vectors() const { return vectors_; }

  const std::vector<double>& vector_of(const std::string& id) const {
    const auto it = index_.find(id);
    if (it == index_.end()) throw Error(ErrorCode::UnknownNode, "no embedding for node '" + id + "'");
    return vectors_[it->second];
  }

  std::optional<std::size_t> index_of(const std::string& id) const {
    const auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::vector<std::string> ids_;
  std::vector<std::vector<double>> vectors_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline double embedding_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

namespace detail {

// Appends the empirical characteristic function of `column` at every sample
// point: real parts first, then imaginary parts.
inline void append_characteristic(const Eigen::Ref<const Eigen::VectorXd>& column,
                                  const std::vector<double>& samples, std::vector<double>& out) {
  const double inv_n = 1.0 / static_cast<double>(column.size());
  const std::size_t base = out.size();
  out.resize(base + 2 * samples.size(), 0.0);
  for (std::size_t k = 0; k < samples.size(); ++k) {
    double re = 0.0, im = 0.0;
    for (Eigen::Index m = 0; m < column.size(); ++m) {
      const double arg = samples[k] * column[m];
      re += std::cos(arg);
      im += std::sin(arg);
    }
    out[base + k] = re * inv_n;
    out[base + samples.size() + k] = im * inv_n;
  }
}

}  // namespace detail

/// Per-node structural signatures from heat-kernel wavelets of the
/// unnormalized Laplacian, computed independently on each connected component.
inline EmbeddingSet compute_embeddings(const Graph& g, const EmbeddingConfig& cfg = {}) {
  cfg.validate();
  if (g.empty()) throw Error(ErrorCode::EmptyGraph, "cannot embed an empty graph");
  const auto samples = cfg.sample_points();
  std::vector<std::vector<double>> vectors(g.size());

  for (const auto& comp : connected_component_indices(g)) {
    const auto n = static_cast<Eigen::Index>(comp.size());
    if (n == 1) {
      Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
      for (std::size_t s = 0; s < cfg.scales.size(); ++s) {
        detail::append_characteristic(one, samples, vectors[comp.front()]);
      }
      continue;
    }
    std::unordered_map<NodeIndex, Eigen::Index> local;
    for (Eigen::Index k = 0; k < n; ++k) local.emplace(comp[static_cast<std::size_t>(k)], k);
    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto v = comp[static_cast<std::size_t>(k)];
      for (const auto w : g.neighbors(v)) {
        lap(k, local.at(w)) = -1.0;
      }
      lap(k, k) = static_cast<double>(g.degree(v));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(lap);
    if (eig.info() != Eigen::Success || !eig.eigenvalues().allFinite()) {
      throw Error(ErrorCode::NumericalFailure, "Laplacian eigendecomposition failed");
    }
    const Eigen::MatrixXd& basis = eig.eigenvectors();
    for (const double scale : cfg.scales) {
      const Eigen::VectorXd filter = (-scale * eig.eigenvalues().array()).exp();
      const Eigen::MatrixXd heat = basis * filter.asDiagonal() * basis.transpose();
      for (Eigen::Index k = 0; k < n; ++k) {
        detail::append_characteristic(heat.col(k), samples, vectors[comp[static_cast<std::size_t>(k)]]);
      }
    }
  }

  std::vector<std::string> ids;
  ids.reserve(g.size());
  for (const auto& node : g.nodes()) ids.push_back(node.id);
  for (const auto& v : vectors) {
    for (const double x : v) {
      if (!std::isfinite(x)) throw Error(ErrorCode::NumericalFailure, "non-finite embedding entry");
    }
  }
  return EmbeddingSet(std::move(ids), std::move(vectors));
}

/// Union over query nodes of their k nearest nodes in embedding space. Each
/// query node counts as its own first neighbour; ties break by node id.
/// Result follows the embedding's node order.
inline std::vector<std::string> knn_similar_nodes(const EmbeddingSet& emb,
                                                  const std::vector<std::string>& query, int k) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
  const auto n = emb.size();
  const auto take = std::min<std::size_t>(static_cast<std::size_t>(k), n);
  std::vector<char> chosen(n, 0);
  std::vector<std::pair<double, std::size_t>> order;
  order.reserve(n);
  for (const auto& q : query) {
    const auto qi = emb.index_of(q);
    if (!qi) throw Error(ErrorCode::UnknownNode, "query node '" + q + "' has no embedding");
    const auto& qv = emb.vectors()[*qi];
    order.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != *qi) order.emplace_back(embedding_distance(qv, emb.vectors()[j]), j);
    }
    const auto cut = take - 1;
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(cut), order.end(),
                      [&](const auto& a, const auto& b) {
                        if (a.first != b.first) return a.first < b.first;
                        return emb.node_ids()[a.second] < emb.node_ids()[b.second];
                      });
    chosen[*qi] = 1;
    for (std::size_t r = 0; r < cut; ++r) chosen[order[r].second] = 1;
  }
  std::vector<std::string> out;
  for (std::size_t j = 0; j < n; ++j) {
    if (chosen[j]) out.push_back(emb.node_ids()[j]);
  }
  return out;
}

/// 64-bit FNV-1a over the canonical graph bytes; keys the embedding cache.
inline std::uint64_t content_hash(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string graph_hash(const Graph& g) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(content_hash(serialize_graph(g))));
  return buf;
}

inline json embedding_config_to_json(const EmbeddingConfig& cfg) {
  return {{"scales", cfg.scales}, {"sample_count", cfg.sample_count}, {"sample_max", cfg.sample_max}};
}

inline EmbeddingConfig embedding_config_from_json(const json& doc, EmbeddingConfig cfg = {}) {
  if (doc.contains("scales")) cfg.scales = doc["scales"].get<std::vector<double>>();
  if (doc.contains("sample_count")) cfg.sample_count = doc["sample_count"].get<int>();
  if (doc.contains("sample_max")) cfg.sample_max = doc["sample_max"].get<double>();
  cfg.validate();
  return cfg;
}

/// Cache document: {"dim","nodes","vectors","config","graph_hash"}.
inline std::string serialize_embedding_cache(const EmbeddingSet& emb, const EmbeddingConfig& cfg,
                                             const std::string& hash) {
  json doc;
  doc["dim"] = emb.dimension();
  doc["nodes"] = emb.node_ids();
  doc["vectors"] = emb.vectors();
  doc["config"] = embedding_config_to_json(cfg);
  doc["graph_hash"] = hash;
  return doc.dump();
}

/// Returns the cached set only when both graph hash and config match.
inline std::optional<EmbeddingSet> parse_embedding_cache(std::string_view text, const EmbeddingConfig& cfg,
                                                         const std::string& hash) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
    if (doc.value("graph_hash", std::string{}) != hash) return std::nullopt;
    if (!doc.contains("config") || embedding_config_from_json(doc["config"]) != cfg) return std::nullopt;
    EmbeddingSet emb(doc["nodes"].get<std::vector<std::string>>(),
                     doc["vectors"].get<std::vector<std::vector<double>>>());
    if (emb.dimension() != cfg.dimension()) return std::nullopt;
    return emb;
  } catch (const json::exception&) {
    return std::nullopt;
  } catch (const Error&) {
    return std::nullopt;
  }
}

/// Loads embeddings from `cache_path` when valid, otherwise computes and
/// rewrites the cache. An empty path disables caching.
inline EmbeddingSet cached_embeddings(const Graph& g, const EmbeddingConfig& cfg, const std::string& cache_path) {
  if (cache_path.empty()) return compute_embeddings(g, cfg);
  const auto hash = graph_hash(g);
  try {
    if (auto hit = parse_embedding_cache(read_file(cache_path), cfg, hash)) return *hit;
  } catch (const Error&) {
  }
  auto emb = compute_embeddings(g, cfg);
  write_file(cache_path, serialize_embedding_cache(emb, cfg, hash));
  return emb;
}

}  // namespace graphtune
