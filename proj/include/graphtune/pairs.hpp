#pragma once

#include <set>
#include <string>
#include <vector>

#include "graphtune/error.hpp"
#include "graphtune/graph.hpp"

namespace graphtune {

/// One source-to-target node pairing.
struct NodePair {
  std::string source;
  std::string target;

  friend bool operator==(const NodePair&, const NodePair&) = default;
  friend auto operator<=>(const NodePair&, const NodePair&) = default;
};

/// Candidate pairings produced by a matcher; injective in both coordinates.
struct CorrespondenceSet {
  std::vector<NodePair> pairs;

  friend bool operator==(const CorrespondenceSet&, const CorrespondenceSet&) = default;
};

/// Trusted pairings driving alignment and deformation.
struct MarkerSet {
  std::vector<NodePair> pairs;
  /// Set when marker selection fell back to embedding-ranked pairs because
  /// filtering rejected everything.
  bool fallback = false;

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }

  friend bool operator==(const MarkerSet&, const MarkerSet&) = default;
};

inline bool is_injective(const std::vector<NodePair>& pairs) {
  std::set<std::string> src, dst;
  for (const auto& p : pairs) {
    if (!src.insert(p.source).second || !dst.insert(p.target).second) return false;
  }
  return true;
}

/// Throws unless every pair references existing nodes and the pairing is
/// injective both ways.
inline void validate_pairs(const std::vector<NodePair>& pairs, const Graph& source,
                           const Graph& target) {
  for (const auto& p : pairs) {
    source.require(p.source);
    target.require(p.target);
  }
  if (!is_injective(pairs)) {
    throw Error(ErrorCode::InvalidArgument, "node pairing is not injective");
  }
}

}  // namespace graphtune
