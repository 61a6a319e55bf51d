#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "graphtune/error.hpp"
#include "graphtune/geometry.hpp"
#include "graphtune/graph.hpp"
#include "graphtune/pairs.hpp"

namespace graphtune {

/// Linearized similarity transform
///   x' =  s*x + h*y + tx
///   y' = -h*x + s*y + ty
struct AffineTransform {
  double s = 1.0;
  double h = 0.0;
  double tx = 0.0;
  double ty = 0.0;

  static AffineTransform identity() { return {}; }

  double determinant() const { return s * s + h * h; }

  Point apply(const Point& p) const { return {s * p.x + h * p.y + tx, -h * p.x + s * p.y + ty}; }

  friend bool operator==(const AffineTransform&, const AffineTransform&) = default;
};

inline AffineTransform invert_transform(const AffineTransform& t) {
  const double det = t.determinant();
  if (!(det > 0.0) || !std::isfinite(det)) {
    throw Error(ErrorCode::DegenerateTransform, "transform has zero scale");
  }
  AffineTransform inv;
  inv.s = t.s / det;
  inv.h = -t.h / det;
  // t' = -M^{-1} t
  inv.tx = -(inv.s * t.tx + inv.h * t.ty);
  inv.ty = -(-inv.h * t.tx + inv.s * t.ty);
  return inv;
}

/// outer ∘ inner: applies `inner` first.
inline AffineTransform compose(const AffineTransform& outer, const AffineTransform& inner) {
  AffineTransform c;
  c.s = outer.s * inner.s - outer.h * inner.h;
  c.h = outer.s * inner.h + outer.h * inner.s;
  const Point t = outer.apply({inner.tx, inner.ty});
  c.tx = t.x;
  c.ty = t.y;
  return c;
}

inline std::vector<Point> apply_transform(const AffineTransform& t, const std::vector<Point>& pts) {
  std::vector<Point> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(t.apply(p));
  return out;
}

inline Graph apply_transform(const AffineTransform& t, const Graph& g) {
  return g.with_positions(apply_transform(t, g.positions()));
}

/// Least-squares transform taking target marker positions onto source marker
/// positions, (s,h,tx,ty) = pinv(A) b with two rows of A per marker:
///   [x  y 1 0] and [y -x 0 1].
inline AffineTransform fit_alignment(const std::vector<Point>& source_pts, const std::vector<Point>& target_pts) {
  if (source_pts.size() != target_pts.size()) {
    throw Error(ErrorCode::InvalidArgument, "marker position lists differ in length");
  }
  if (source_pts.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "alignment needs at least two markers");
  }
  const auto m = static_cast<Eigen::Index>(source_pts.size());
  Eigen::MatrixXd a(2 * m, 4);
  Eigen::VectorXd b(2 * m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& t = target_pts[static_cast<std::size_t>(i)];
    const auto& s = source_pts[static_cast<std::size_t>(i)];
    a.row(2 * i) << t.x, t.y, 1.0, 0.0;
    a.row(2 * i + 1) << t.y, -t.x, 0.0, 1.0;
    b(2 * i) = s.x;
    b(2 * i + 1) = s.y;
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
  if (cod.rank() < 4) {
    throw Error(ErrorCode::RankDeficient, "target markers coincide; alignment is undetermined");
  }
  const Eigen::VectorXd x = cod.solve(b);
  return {x(0), x(1), x(2), x(3)};
}

inline AffineTransform fit_alignment(const MarkerSet& markers, const Graph& source, const Graph& target) {
  std::vector<Point> sp, tp;
  sp.reserve(markers.size());
  tp.reserve(markers.size());
  for (const auto& pair : markers.pairs) {
    sp.push_back(source.position(source.require(pair.source)));
    tp.push_back(target.position(target.require(pair.target)));
  }
  return fit_alignment(sp, tp);
}

/// Sum of squared marker residuals after applying t to the target points.
inline double alignment_residual(const AffineTransform& t, const std::vector<Point>& source_pts,
                                 const std::vector<Point>& target_pts) {
  double r = 0.0;
  for (std::size_t i = 0; i < source_pts.size(); ++i) {
    const Point d = t.apply(target_pts[i]) - source_pts[i];
    r += dot(d, d);
  }
  return r;
}

}  // namespace graphtune
