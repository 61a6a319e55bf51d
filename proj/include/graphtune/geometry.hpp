#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace graphtune {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;

  Point& operator+=(const Point& o) { x += o.x; y += o.y; return *this; }
  Point& operator-=(const Point& o) { x -= o.x; y -= o.y; return *this; }
  friend Point operator+(Point a, const Point& b) { return a += b; }
  friend Point operator-(Point a, const Point& b) { return a -= b; }
  friend Point operator*(double s, const Point& p) { return {s * p.x, s * p.y}; }
  friend Point operator*(const Point& p, double s) { return {s * p.x, s * p.y}; }
  friend Point operator/(const Point& p, double s) { return {p.x / s, p.y / s}; }
};

inline double dot(const Point& a, const Point& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Point& a, const Point& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Point& p) { return std::hypot(p.x, p.y); }
inline double distance(const Point& a, const Point& b) { return norm(a - b); }

/// Unit vector in the direction of p; the zero vector maps to zero.
inline Point normalized(const Point& p) {
  const double n = norm(p);
  return n > 0.0 ? p / n : Point{};
}

struct BoundingBox {
  Point lo;
  Point hi;

  double diagonal() const { return distance(lo, hi); }
};

inline BoundingBox bounding_box(std::span<const Point> pts) {
  if (pts.empty()) return {};
  BoundingBox box{pts.front(), pts.front()};
  for (const auto& p : pts) {
    box.lo.x = std::min(box.lo.x, p.x);
    box.lo.y = std::min(box.lo.y, p.y);
    box.hi.x = std::max(box.hi.x, p.x);
    box.hi.y = std::max(box.hi.y, p.y);
  }
  return box;
}

inline double max_displacement(std::span<const Point> a, std::span<const Point> b) {
  double worst = 0.0;
  const auto n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, distance(a[i], b[i]));
  return worst;
}

}  // namespace graphtune
