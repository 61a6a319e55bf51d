#pragma once

// Independent reference implementations shared by the unit tests and the
// acceptance run. They avoid the library's own helpers on purpose.

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "graphtune/alignment.hpp"
#include "graphtune/assignment.hpp"
#include "graphtune/pairs.hpp"

namespace graphtune::testing {

// Normal equations for the alignment least-squares problem, written out with
// sums instead of building the design matrix.
inline AffineTransform normal_equations(const std::vector<Point>& src, const std::vector<Point>& tgt) {
  Eigen::Matrix4d ata = Eigen::Matrix4d::Zero();
  Eigen::Vector4d atb = Eigen::Vector4d::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double x = tgt[i].x, y = tgt[i].y;
    const Eigen::Vector4d r1(x, y, 1, 0), r2(y, -x, 0, 1);
    ata += r1 * r1.transpose() + r2 * r2.transpose();
    atb += r1 * src[i].x + r2 * src[i].y;
  }
  const Eigen::Vector4d v = ata.ldlt().solve(atb);
  return {v(0), v(1), v(2), v(3)};
}

struct BestAssignment {
  std::size_t count = 0;
  double cost = std::numeric_limits<double>::infinity();
};

// Exhaustive search over every injective map of the smaller side into the
// larger one: maximize the number of allowed pairs, then minimize cost.
inline BestAssignment exhaustive_assignment(const CostTable& t) {
  const bool transpose = t.rows() > t.cols();
  const auto small = std::min(t.rows(), t.cols());
  const auto large = std::max(t.rows(), t.cols());
  auto cell = [&](std::size_t a, std::size_t b) { return transpose ? t(b, a) : t(a, b); };
  std::vector<std::size_t> perm(large);
  std::iota(perm.begin(), perm.end(), 0);
  BestAssignment best;
  do {
    BestAssignment cur{0, 0.0};
    for (std::size_t a = 0; a < small; ++a) {
      const double c = cell(a, perm[a]);
      if (std::isfinite(c)) {
        ++cur.count;
        cur.cost += c;
      }
    }
    if (cur.count > best.count || (cur.count == best.count && cur.cost < best.cost)) best = cur;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// The correspondence filter transcribed line by line with plain containers
// and its own helpers.
inline MarkerSet filter_transcription(const Graph& S, const Graph& T, const CorrespondenceSet& C, double r_u, double r_d) {
  std::map<std::string, std::string> corr;
  for (const auto& p : C.pairs) corr[p.source] = p.target;
  auto mean_adjacent = [](const Graph& g, std::size_t v) {
    double s = 0;
    for (const auto w : g.neighbors(v)) {
      const double dx = g.position(v).x - g.position(w).x, dy = g.position(v).y - g.position(w).y;
      s += std::sqrt(dx * dx + dy * dy);
    }
    return g.degree(v) ? s / static_cast<double>(g.degree(v)) : 0.0;
  };
  MarkerSet M;
  for (const auto& p : C.pairs) {
    const auto cs = *S.index_of(p.source);
    const auto ct = *T.index_of(p.target);
    std::set<std::string> ns, nt, nu;
    for (const auto n : S.neighbors(cs))
      if (corr.count(S.id(n))) ns.insert(corr[S.id(n)]);
    for (const auto n : T.neighbors(ct)) nt.insert(T.id(n));
    std::set_intersection(ns.begin(), ns.end(), nt.begin(), nt.end(), std::inserter(nu, nu.begin()));
    if (nu.size() > ns.size() * r_u || nu.size() > nt.size() * r_u) {
      const double ds = mean_adjacent(S, cs);
      const double dt = mean_adjacent(T, ct);
      const double dx = S.position(cs).x - T.position(ct).x, dy = S.position(cs).y - T.position(ct).y;
      const double d = std::sqrt(dx * dx + dy * dy);
      if (d < ds * r_d && d < dt * r_d) M.pairs.push_back(p);
    }
  }
  return M;
}

// Orbits of the automorphism group by trying every permutation.
inline std::vector<int> automorphism_orbits(const Graph& g) {
  const auto n = g.size();
  std::vector<int> orbit(n);
  std::iota(orbit.begin(), orbit.end(), 0);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool automorphism = true;
    for (const auto& e : g.edges()) {
      if (!g.has_edge(perm[e.u], perm[e.v])) {
        automorphism = false;
        break;
      }
    }
    if (!automorphism) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const int a = orbit[i], b = orbit[perm[i]];
      const int lo = std::min(a, b);
      for (auto& o : orbit)
        if (o == a || o == b) o = lo;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return orbit;
}

}  // namespace graphtune::testing
