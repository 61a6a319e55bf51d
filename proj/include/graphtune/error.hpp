#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace graphtune {

enum class ErrorCode {
  MalformedSyntax,
  DanglingEndpoint,
  DuplicateId,
  NonFiniteCoordinate,
  UnknownNode,
  EmptyGraph,
  Disconnected,
  InvalidArgument,
  RankDeficient,
  DegenerateTransform,
  Infeasible,
  NumericalFailure,
  NodeSetMismatch,
  NoAnchors,
  CoincidentNodes,
  NotFound,
  StaleRevision,
  EmptyClipboard,
  Io,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedSyntax: return "malformed_syntax";
    case ErrorCode::DanglingEndpoint: return "dangling_endpoint";
    case ErrorCode::DuplicateId: return "duplicate_id";
    case ErrorCode::NonFiniteCoordinate: return "non_finite_coordinate";
    case ErrorCode::UnknownNode: return "unknown_node";
    case ErrorCode::EmptyGraph: return "empty_graph";
    case ErrorCode::Disconnected: return "disconnected";
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::RankDeficient: return "rank_deficient";
    case ErrorCode::DegenerateTransform: return "degenerate_transform";
    case ErrorCode::Infeasible: return "infeasible";
    case ErrorCode::NumericalFailure: return "numerical_failure";
    case ErrorCode::NodeSetMismatch: return "node_set_mismatch";
    case ErrorCode::NoAnchors: return "no_anchors";
    case ErrorCode::CoincidentNodes: return "coincident_nodes";
    case ErrorCode::NotFound: return "not_found";
    case ErrorCode::StaleRevision: return "stale_revision";
    case ErrorCode::EmptyClipboard: return "empty_clipboard";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace graphtune
