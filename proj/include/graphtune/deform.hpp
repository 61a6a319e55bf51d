#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "graphtune/error.hpp"
#include "graphtune/geometry.hpp"
#include "graphtune/graph.hpp"

namespace graphtune {

/// Weights and stopping rules for the deformation energy
///   E = alpha*E_O + beta*E_D + gamma*E_M.
struct DeformParams {
  double alpha = 1.0;  // orientation preservation
  double beta = 5.0;   // distance preservation
  double gamma = 1000.0;  // marker attraction
  double w = 1.0;      // extra weight on edges
  int max_iterations = 300;
  double convergence_tol = 1e-4;
  /// Up to this many nodes every node pair contributes; above it only edges
  /// and pairs two hops apart.
  std::size_t full_pair_limit = 300;

  void validate() const {
    if (!(alpha >= 0.0) || !(beta >= 0.0) || !(gamma >= 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "alpha, beta, gamma must be non-negative");
    }
    if (!(alpha + beta > 0.0)) throw Error(ErrorCode::InvalidArgument, "alpha + beta must be positive");
    if (!(w >= 1.0)) throw Error(ErrorCode::InvalidArgument, "edge preservation degree w must be >= 1");
    if (max_iterations < 0) throw Error(ErrorCode::InvalidArgument, "max-iterations must be >= 0");
    if (!(convergence_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "convergence-tol must be positive");
  }
};

/// Goal position for one node of the deformed graph.
struct Anchor {
  std::string node;
  Point goal;
};

struct EnergyTerms {
  double orientation = 0.0;
  double distance = 0.0;
  double marker = 0.0;
  double total = 0.0;
};

struct DeformResult {
  Graph graph;
  /// Total energy at the start and after every accepted iteration.
  std::vector<double> energy;
  EnergyTerms final_terms;
  int iterations = 0;
  bool converged = false;
};

namespace detail {

struct PairTerm {
  Eigen::Index i;
  Eigen::Index j;
  double weight;     // w_ij
  double length;     // |v_i - v_j| in the reference
  Point direction;   // norm(v_i - v_j) in the reference
};

struct AnchorTerm {
  Eigen::Index node;
  Point goal;
};

// All quantities live in a frame where the reference layout is centred and
// its mean edge length is 1, so gamma means the same thing at any zoom.
class DeformProblem {
 public:
  DeformProblem(const Graph& reference, const std::vector<Anchor>& anchors, const DeformParams& p)
      : params_(p), n_(static_cast<Eigen::Index>(reference.size())) {
    const auto pts = reference.positions();
    Point centre{};
    for (const auto& q : pts) centre += q;
    centre = centre / static_cast<double>(pts.size());
    const double diag = bounding_box(pts).diagonal();
    if (!(diag > 0.0)) throw Error(ErrorCode::CoincidentNodes, "all nodes coincide; pair weights are undefined");
    scale_ = mean_edge_length(reference);
    if (!(scale_ > 0.0)) scale_ = diag;
    origin_ = centre;
    ref_.resize(n_, 2);
    for (Eigen::Index i = 0; i < n_; ++i) {
      const Point q = to_frame(pts[static_cast<std::size_t>(i)]);
      ref_(i, 0) = q.x;
      ref_(i, 1) = q.y;
    }
    diag_ = diag / scale_;
    floor_ = 1e-6 * diag_;

    for (const auto& a : anchors) {
      anchors_.push_back({static_cast<Eigen::Index>(reference.require(a.node)), to_frame(a.goal)});
    }
    build_pairs(reference);
  }

  Eigen::Index size() const { return n_; }
  double diagonal() const { return diag_; }
  const Eigen::MatrixXd& reference() const { return ref_; }
  bool dense() const { return static_cast<std::size_t>(n_) <= params_.full_pair_limit; }

  Point to_frame(const Point& p) const { return (p - origin_) / scale_; }
  Point from_frame(const Point& p) const { return p * scale_ + origin_; }

  EnergyTerms energy(const Eigen::MatrixXd& x) const {
    EnergyTerms e;
    for (const auto& t : pairs_) {
      const Point a{x(t.i, 0) - x(t.j, 0), x(t.i, 1) - x(t.j, 1)};
      const Point o = t.direction - normalized(a);
      e.orientation += t.weight * dot(o, o);
      const double r = norm(a) - t.length;
      e.distance += t.weight * r * r;
    }
    for (const auto& m : anchors_) {
      const Point d{x(m.node, 0) - m.goal.x, x(m.node, 1) - m.goal.y};
      e.marker += dot(d, d);
    }
    e.total = params_.alpha * e.orientation + params_.beta * e.distance + params_.gamma * e.marker;
    return e;
  }

  /// Minimizer of the quadratic surrogate built at z. The surrogate touches
  /// E at z with the same gradient, so the step is a descent direction.
  Eigen::MatrixXd propose(const Eigen::MatrixXd& z) const {
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n_, 2);
    std::vector<double> diag(static_cast<std::size_t>(n_), 0.0);
    std::vector<Eigen::Triplet<double>> offdiag;
    Eigen::MatrixXd dense_a;
    if (dense()) dense_a = Eigen::MatrixXd::Zero(n_, n_);
    else offdiag.reserve(2 * pairs_.size());

    for (const auto& t : pairs_) {
      const Point a{z(t.i, 0) - z(t.j, 0), z(t.i, 1) - z(t.j, 1)};
      const double r = std::max(norm(a), floor_);
      const Point e = normalized(a);
      const double c = dot(t.direction, e);
      const Point u_target = t.direction + (1.0 - c) * e;
      const double k = params_.alpha * t.weight / (r * r) + params_.beta * t.weight;
      const Point b = (params_.alpha * t.weight / r) * u_target + (params_.beta * t.weight * t.length) * e;
      diag[static_cast<std::size_t>(t.i)] += k;
      diag[static_cast<std::size_t>(t.j)] += k;
      if (dense()) {
        dense_a(t.i, t.j) -= k;
        dense_a(t.j, t.i) -= k;
      } else {
        offdiag.emplace_back(t.i, t.j, -k);
        offdiag.emplace_back(t.j, t.i, -k);
      }
      rhs(t.i, 0) += b.x;
      rhs(t.i, 1) += b.y;
      rhs(t.j, 0) -= b.x;
      rhs(t.j, 1) -= b.y;
    }
    for (const auto& m : anchors_) {
      diag[static_cast<std::size_t>(m.node)] += params_.gamma;
      rhs(m.node, 0) += params_.gamma * m.goal.x;
      rhs(m.node, 1) += params_.gamma * m.goal.y;
    }
    // Tiny proximal term keeps the system definite when gamma is 0 or a
    // pair-graph component carries no anchor.
    double mean_diag = 0.0;
    for (const double d : diag) mean_diag += d;
    const double mu = 1e-10 * std::max(mean_diag / static_cast<double>(n_), 1e-12);
    for (Eigen::Index i = 0; i < n_; ++i) {
      diag[static_cast<std::size_t>(i)] += mu;
      rhs.row(i) += mu * z.row(i);
    }

    if (dense()) {
      for (Eigen::Index i = 0; i < n_; ++i) dense_a(i, i) += diag[static_cast<std::size_t>(i)];
      Eigen::LDLT<Eigen::MatrixXd> solver(dense_a);
      if (solver.info() != Eigen::Success) throw Error(ErrorCode::NumericalFailure, "deform system solve failed");
      return solver.solve(rhs);
    }
    for (Eigen::Index i = 0; i < n_; ++i) offdiag.emplace_back(i, i, diag[static_cast<std::size_t>(i)]);
    Eigen::SparseMatrix<double> sparse_a(n_, n_);
    sparse_a.setFromTriplets(offdiag.begin(), offdiag.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(sparse_a);
    if (solver.info() != Eigen::Success) throw Error(ErrorCode::NumericalFailure, "deform system solve failed");
    Eigen::MatrixXd out = solver.solve(rhs);
    return out;
  }

 private:
  void build_pairs(const Graph& g) {
    auto add = [&](Eigen::Index i, Eigen::Index j) {
      const Point a{ref_(i, 0) - ref_(j, 0), ref_(i, 1) - ref_(j, 1)};
      const double len = norm(a);
      const double eff = std::max(len, floor_);
      const double base = g.has_edge(static_cast<NodeIndex>(i), static_cast<NodeIndex>(j)) ? params_.w : 1.0;
      pairs_.push_back({i, j, base / (eff * eff), len, normalized(a)});
    };
    if (dense()) {
      for (Eigen::Index i = 0; i < n_; ++i) {
        for (Eigen::Index j = i + 1; j < n_; ++j) add(i, j);
      }
      return;
    }
    for (NodeIndex i = 0; i < g.size(); ++i) {
      std::vector<NodeIndex> near;
      for (const auto a : g.neighbors(i)) {
        near.push_back(a);
        for (const auto b : g.neighbors(a)) near.push_back(b);
      }
      std::sort(near.begin(), near.end());
      near.erase(std::unique(near.begin(), near.end()), near.end());
      for (const auto j : near) {
        if (j > i) add(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
  }

  DeformParams params_;
  Eigen::Index n_;
  Eigen::MatrixXd ref_;
  Point origin_;
  double scale_ = 1.0;
  double diag_ = 1.0;
  double floor_ = 0.0;
  std::vector<PairTerm> pairs_;
  std::vector<AnchorTerm> anchors_;
};

}  // namespace detail

/// Energy of `deformed` relative to `reference`, measured in the solver's
/// normalized frame (reference centred, mean edge length 1).
inline EnergyTerms deformation_energy(const Graph& reference, const Graph& deformed,
                                      const std::vector<Anchor>& anchors, const DeformParams& p = {}) {
  if (reference.size() != deformed.size()) throw Error(ErrorCode::NodeSetMismatch, "layouts differ in size");
  const detail::DeformProblem problem(reference, anchors, p);
  Eigen::MatrixXd x(problem.size(), 2);
  for (Eigen::Index i = 0; i < problem.size(); ++i) {
    const Point q = problem.to_frame(deformed.position(static_cast<NodeIndex>(i)));
    x(i, 0) = q.x;
    x(i, 1) = q.y;
  }
  return problem.energy(x);
}

/// Moves the nodes of `target` so anchored nodes approach their goals while
/// pairwise orientations and distances of the input layout are preserved.
/// Each iteration solves the surrogate system rebuilt at the current layout
/// and backtracks along the step until E does not increase. A step shorter
/// than convergence_tol times the layout diagonal ends the loop unapplied.
inline DeformResult deform_with_trace(const Graph& target, const std::vector<Anchor>& anchors,
                                      const DeformParams& p = {}) {
  p.validate();
  if (anchors.empty()) throw Error(ErrorCode::NoAnchors, "deformation needs at least one anchor");
  if (target.size() < 2) throw Error(ErrorCode::InvalidArgument, "deformation needs at least two nodes");
  const detail::DeformProblem problem(target, anchors, p);

  DeformResult result;
  Eigen::MatrixXd z = problem.reference();
  EnergyTerms current = problem.energy(z);
  result.energy.push_back(current.total);
  const double step_tol = p.convergence_tol * problem.diagonal();

  for (int it = 0; it < p.max_iterations; ++it) {
    const Eigen::MatrixXd proposal = problem.propose(z);
    const Eigen::MatrixXd step = proposal - z;
    const double step_len = step.rowwise().norm().maxCoeff();
    if (!std::isfinite(step_len)) throw Error(ErrorCode::NumericalFailure, "deform produced a non-finite step");
    if (step_len < step_tol) {
      result.converged = true;
      break;
    }
    double t = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 40; ++halving, t *= 0.5) {
      const Eigen::MatrixXd trial = z + t * step;
      const EnergyTerms e = problem.energy(trial);
      if (e.total <= current.total) {
        z = trial;
        current = e;
        accepted = true;
        break;
      }
      if (t * step_len < step_tol) break;
    }
    if (!accepted) {
      // No decrease along the descent direction at resolvable step sizes.
      result.converged = true;
      break;
    }
    result.energy.push_back(current.total);
    ++result.iterations;
  }

  std::vector<Point> pts(target.size());
  for (Eigen::Index i = 0; i < problem.size(); ++i) {
    pts[static_cast<std::size_t>(i)] = problem.from_frame({z(i, 0), z(i, 1)});
  }
  if (result.iterations == 0) {
    result.graph = target;
  } else {
    result.graph = target.with_positions(pts);
  }
  result.final_terms = current;
  return result;
}

inline Graph deform(const Graph& target, const std::vector<Anchor>& anchors, const DeformParams& p = {}) {
  return deform_with_trace(target, anchors, p).graph;
}

}  // namespace graphtune
