#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "graphtune/error.hpp"
#include "graphtune/graph.hpp"

namespace graphtune {

struct LayoutOptions {
  int max_iterations = 500;
  /// Stop once the relative stress decrease falls below this.
  double tolerance = 1e-10;
  /// Only consulted when the spectral start is degenerate in a way no
  /// structural quantity can resolve.
  std::uint64_t seed = 0;
};

struct LayoutResult {
  Graph graph;
  /// Stress after the spectral start and after every majorization step.
  std::vector<double> stress;
};

namespace detail {

inline Eigen::MatrixXd hop_distances(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto row = bfs_distances(g, static_cast<NodeIndex>(i));
    for (Eigen::Index j = 0; j < n; ++j) d(i, j) = row[static_cast<std::size_t>(j)];
  }
  return d;
}

inline double layout_stress(const Eigen::MatrixXd& x, const Eigen::MatrixXd& d) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < x.rows(); ++j) {
      const double r = (x.row(i) - x.row(j)).norm() - d(i, j);
      s += r * r / (d(i, j) * d(i, j));
    }
  }
  return s;
}

// Nodes with identical hop-distance rows land on the same point under
// classical scaling and majorization never pulls them apart. Spread each such
// group on a small circle, ordered by id.
inline void separate_twins(const Graph& g, Eigen::MatrixXd& x) {
  const auto n = x.rows();
  constexpr double eps = 1e-9;
  constexpr double radius = 0.05;
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (seen[static_cast<std::size_t>(i)]) continue;
    std::vector<Eigen::Index> group{i};
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (!seen[static_cast<std::size_t>(j)] && (x.row(i) - x.row(j)).norm() < eps) group.push_back(j);
    }
    for (const auto k : group) seen[static_cast<std::size_t>(k)] = 1;
    if (group.size() < 2) continue;
    std::sort(group.begin(), group.end(), [&](Eigen::Index a, Eigen::Index b) {
      return g.id(static_cast<NodeIndex>(a)) < g.id(static_cast<NodeIndex>(b));
    });
    const double step = 2.0 * std::numbers::pi / static_cast<double>(group.size());
    const double cx = x(group[0], 0), cy = x(group[0], 1);
    for (std::size_t m = 0; m < group.size(); ++m) {
      x(group[m], 0) = cx + radius * std::cos(step * static_cast<double>(m));
      x(group[m], 1) = cy + radius * std::sin(step * static_cast<double>(m));
    }
  }
}

// Classical scaling of the hop-distance matrix. Axis signs are fixed by the
// third moment so that relabelled copies of a graph start identically.
inline Eigen::MatrixXd spectral_start(const Graph& g, const Eigen::MatrixXd& d, std::uint64_t seed) {
  const auto n = d.rows();
  const Eigen::MatrixXd sq = d.array().square();
  const Eigen::MatrixXd centering =
      Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  const Eigen::MatrixXd b = -0.5 * centering * sq * centering;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b);
  if (eig.info() != Eigen::Success) throw Error(ErrorCode::NumericalFailure, "classical scaling failed");
  Eigen::MatrixXd x(n, 2);
  const double top = std::max(eig.eigenvalues()(n - 1), 0.0);
  for (int axis = 0; axis < 2; ++axis) {
    const Eigen::Index k = n - 1 - axis;
    const double lambda = k >= 0 ? std::max(eig.eigenvalues()(k), 0.0) : 0.0;
    if (k >= 0) {
      x.col(axis) = eig.eigenvectors().col(k) * std::sqrt(lambda);
    } else {
      x.col(axis).setZero();
    }
    const double skew = x.col(axis).array().cube().sum();
    if (skew < -1e-12) x.col(axis) *= -1.0;
    if (axis == 1 && lambda <= 1e-9 * top) {
      // Collinear start: bend it using degree and eccentricity, which do not
      // depend on node order.
      for (Eigen::Index i = 0; i < n; ++i) {
        const double ecc = d.row(i).maxCoeff();
        x(i, 1) = 1e-3 * (static_cast<double>(g.degree(static_cast<NodeIndex>(i))) + 0.5 * ecc);
      }
      x.col(1).array() -= x.col(1).mean();
      if (x.col(1).norm() < 1e-12 && n > 2) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> jitter(-1e-3, 1e-3);
        for (Eigen::Index i = 0; i < n; ++i) x(i, 1) = jitter(rng);
      }
    }
  }
  separate_twins(g, x);
  return x;
}

}  // namespace detail

/// Stress-majorization layout with hop distances as targets and weights
/// d^-2, started from classical scaling. Deterministic for a given graph.
inline LayoutResult reference_layout_with_trace(const Graph& g, const LayoutOptions& opts = {}) {
  if (g.empty()) throw Error(ErrorCode::EmptyGraph, "cannot lay out an empty graph");
  if (!is_connected(g)) throw Error(ErrorCode::Disconnected, "reference layout needs a connected graph");
  const auto n = static_cast<Eigen::Index>(g.size());
  if (n == 1) return {g.with_positions({Point{}}), {0.0}};

  const Eigen::MatrixXd d = detail::hop_distances(g);
  Eigen::MatrixXd x = detail::spectral_start(g, d, opts.seed);

  Eigen::MatrixXd lw = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      lw(i, j) = -1.0 / (d(i, j) * d(i, j));
      lw(i, i) -= lw(i, j);
    }
  }
  // L_w is singular along the all-ones vector; shifting by 11^T/n leaves the
  // solution of a zero-sum right-hand side unchanged and centred.
  const Eigen::LDLT<Eigen::MatrixXd> solver(lw + Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n)));

  LayoutResult result;
  double stress = detail::layout_stress(x, d);
  result.stress.push_back(stress);
  Eigen::MatrixXd bz(n, n);
  for (int it = 0; it < opts.max_iterations; ++it) {
    bz.setZero();
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i == j) continue;
        const double dist = (x.row(i) - x.row(j)).norm();
        if (dist > 1e-12) bz(i, j) = -(1.0 / d(i, j)) / dist;
        bz(i, i) -= bz(i, j);
      }
    }
    Eigen::MatrixXd next = solver.solve(bz * x);
    const double next_stress = detail::layout_stress(next, d);
    x = std::move(next);
    result.stress.push_back(next_stress);
    const bool done = stress - next_stress <= opts.tolerance * std::max(stress, 1e-300);
    stress = next_stress;
    if (done) break;
  }

  std::vector<Point> pts(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) pts[static_cast<std::size_t>(i)] = {x(i, 0), x(i, 1)};
  result.graph = g.with_positions(pts);
  return result;
}

inline Graph reference_layout(const Graph& g, const LayoutOptions& opts = {}) {
  return reference_layout_with_trace(g, opts).graph;
}

}  // namespace graphtune
