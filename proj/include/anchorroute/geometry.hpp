#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

namespace anchorroute {

struct Point2D {
  double x = 0.0;
  double y = 0.0;
};

inline double euclidean(const Point2D& a, const Point2D& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Concave obstacle: the outer disk minus the open inner disk. Points exactly
// on the boundary count as inside, so the region test uses <= / >=.
struct CrescentObstacle {
  Point2D outer_center;
  double outer_radius = 0.0;
  Point2D inner_center;
  double inner_radius = 0.0;

  bool contains(const Point2D& p) const {
    return euclidean(p, outer_center) <= outer_radius &&
           euclidean(p, inner_center) >= inner_radius;
  }

  // Empty means the inner disk swallows the outer one.
  bool empty() const {
    return euclidean(outer_center, inner_center) + outer_radius <= inner_radius;
  }
};

namespace detail {

// Roots t of |a + t(b-a) - c| = r, unclipped. The closed disk covers
// [first, second] of the line's parameter; nullopt when the line misses it.
inline std::optional<std::pair<double, double>> line_disk_roots(
    const Point2D& a, const Point2D& b, const Point2D& c, double r) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double fx = a.x - c.x, fy = a.y - c.y;
  const double qa = dx * dx + dy * dy;
  const double qb = 2.0 * (fx * dx + fy * dy);
  const double qc = fx * fx + fy * fy - r * r;
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc < 0.0) return std::nullopt;
  const double sq = std::sqrt(disc);
  return std::make_pair((-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa));
}

}  // namespace detail

// True iff the open segment ab meets the crescent region. The part of the
// segment inside the outer disk is a parameter interval [t0,t1]; the segment
// is clear only when that interval is empty, reduces to one of the segment's
// endpoints, or sits strictly inside the open inner disk (the hole, whose
// boundary belongs to the obstacle).
inline bool segment_blocked(const Point2D& a, const Point2D& b,
                            const CrescentObstacle& obs) {
  if (a.x == b.x && a.y == b.y) return false;  // open segment is empty
  const auto outer = detail::line_disk_roots(a, b, obs.outer_center, obs.outer_radius);
  if (!outer) return false;
  const double t0 = std::max(outer->first, 0.0);
  const double t1 = std::min(outer->second, 1.0);
  if (t0 > t1) return false;
  if (t0 == t1 && (t0 == 0.0 || t0 == 1.0)) return false;  // endpoint graze
  if (obs.inner_radius <= 0.0) return true;
  const auto inner = detail::line_disk_roots(a, b, obs.inner_center, obs.inner_radius);
  if (!inner) return true;
  return !(inner->first < t0 && t1 < inner->second);
}

}  // namespace anchorroute
