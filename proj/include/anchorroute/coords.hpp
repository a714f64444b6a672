#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "anchorroute/topology.hpp"

namespace anchorroute {

enum class CoordMode { euclidean, hop };

inline const char* to_string(CoordMode m) {
  return m == CoordMode::euclidean ? "euclidean" : "hop";
}

// Ordered anchors: coordinate index i is the distance to ids[i].
struct AnchorSet {
  std::vector<NodeId> ids;
  CoordMode mode = CoordMode::euclidean;
};

struct CoordBuildError : std::runtime_error {
  NodeId node;
  NodeId anchor;
  CoordBuildError(NodeId n, NodeId a)
      : std::runtime_error("build_coords: node " + std::to_string(n) +
                           " unreachable from anchor " + std::to_string(a)),
        node(n),
        anchor(a) {}
};

// k distinct ids drawn uniformly without replacement from a candidate pool
// (partial Fisher-Yates).
inline AnchorSet select_anchors_from(std::span<const NodeId> candidates, std::size_t k,
                                     std::uint64_t seed,
                                     CoordMode mode = CoordMode::euclidean) {
  if (k > candidates.size())
    throw std::invalid_argument("select_anchors: k exceeds candidate count");
  std::vector<NodeId> ids(candidates.begin(), candidates.end());
  Rng rng(Rng::derive(seed, /*tag=*/0x02));
  for (std::size_t i = 0; i < k; ++i)
    std::swap(ids[i], ids[i + rng.below(ids.size() - i)]);
  ids.resize(k);
  return AnchorSet{std::move(ids), mode};
}

inline AnchorSet select_anchors(const Network& net, std::size_t k, std::uint64_t seed,
                                CoordMode mode = CoordMode::euclidean) {
  std::vector<NodeId> ids(net.size());
  std::iota(ids.begin(), ids.end(), 0u);
  return select_anchors_from(ids, k, seed, mode);
}

// L2 distance between two coordinate vectors (the anchors distance d_a).
inline double anchors_distance(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size())
    throw std::invalid_argument("anchors_distance: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = u[i] - v[i];
    s += d * d;
  }
  return std::sqrt(s);
}

// Same, restricted to a subset of coordinate indices.
inline double anchors_distance_filtered(std::span<const double> u,
                                        std::span<const double> v,
                                        std::span<const std::size_t> kept) {
  if (u.size() != v.size())
    throw std::invalid_argument("anchors_distance: length mismatch");
  double s = 0.0;
  for (std::size_t i : kept) {
    const double d = u[i] - v[i];
    s += d * d;
  }
  return std::sqrt(s);
}

// In the plane: at least three points, not all on one line. Collinearity is
// judged by signed area against 1e-9 times the bounding-box scale squared.
inline bool is_general_setting(std::span<const Point2D> points) {
  if (points.size() < 3) return false;
  double lox = points[0].x, hix = points[0].x, loy = points[0].y, hiy = points[0].y;
  for (const auto& p : points) {
    lox = std::min(lox, p.x);
    hix = std::max(hix, p.x);
    loy = std::min(loy, p.y);
    hiy = std::max(hiy, p.y);
  }
  const double scale = std::max(hix - lox, hiy - loy);
  const double tol = 1e-9 * scale * scale;
  const Point2D& p0 = points[0];
  std::size_t j = 1;
  while (j < points.size() && points[j].x == p0.x && points[j].y == p0.y) ++j;
  if (j == points.size()) return false;  // all points coincide
  const Point2D& p1 = points[j];
  for (std::size_t i = j + 1; i < points.size(); ++i) {
    const double cross = (p1.x - p0.x) * (points[i].y - p0.y) -
                         (p1.y - p0.y) * (points[i].x - p0.x);
    if (std::abs(cross) > tol) return true;
  }
  return false;
}

// Drops anchor indices that sit between sender and destination: index i goes
// when f_i(sender) < d_a(sender, dest) and f_i(sender) < max_j f_j(sender)/2.
// If everything would be dropped, the full index set is returned instead.
inline std::vector<std::size_t> filter_anchors(std::span<const double> sender,
                                               std::span<const double> dest) {
  if (sender.empty() || sender.size() != dest.size())
    throw std::invalid_argument("filter_anchors: bad vector lengths");
  const double to_dest = anchors_distance(sender, dest);
  const double farthest = *std::max_element(sender.begin(), sender.end());
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < sender.size(); ++i)
    if (!(sender[i] < to_dest && sender[i] < farthest / 2.0)) kept.push_back(i);
  if (kept.empty()) {
    kept.resize(sender.size());
    std::iota(kept.begin(), kept.end(), std::size_t{0});
  }
  return kept;
}

enum class UnreachablePolicy {
  error,  // any node not reachable from every anchor fails the build
  drop,   // such nodes are left without coordinates
};

// Per-node coordinate vectors under the anchor set's base distance. Hop
// components come from one BFS flood per anchor and are stored as reals so
// the vector algebra downstream is mode-agnostic. Immutable once built.
class CoordinateSystem {
 public:
  const AnchorSet& anchors() const { return anchors_; }
  std::size_t dimension() const { return anchors_.ids.size(); }
  std::size_t node_count() const { return n_; }

  bool has_coords(NodeId u) const { return valid_[u]; }
  const std::vector<std::uint8_t>& validity() const { return valid_; }
  const std::vector<double>& table() const { return table_; }
  std::span<const double> coord(NodeId u) const {
    return {table_.data() + std::size_t(u) * dimension(), dimension()};
  }

  // Broadcast count of the hop-mode preprocessing floods (one rebroadcast
  // per reached node per anchor); zero in euclidean mode.
  std::uint64_t flood_messages() const { return flood_messages_; }

  // Groups of nodes sharing an identical coordinate vector (hop mode can
  // produce these; destination checks must therefore use node identity).
  std::vector<std::vector<NodeId>> coordinate_collisions() const {
    std::map<std::vector<double>, std::vector<NodeId>> groups;
    std::vector<double> key(dimension());
    for (NodeId u = 0; u < n_; ++u) {
      if (!valid_[u]) continue;
      auto c = coord(u);
      key.assign(c.begin(), c.end());
      groups[key].push_back(u);
    }
    std::vector<std::vector<NodeId>> out;
    for (auto& [k, nodes] : groups)
      if (nodes.size() > 1) out.push_back(std::move(nodes));
    return out;
  }

  friend CoordinateSystem build_coords(const Network&, const AnchorSet&, UnreachablePolicy);

 private:
  AnchorSet anchors_;
  std::size_t n_ = 0;
  std::vector<double> table_;
  std::vector<std::uint8_t> valid_;
  std::uint64_t flood_messages_ = 0;
};

inline CoordinateSystem build_coords(const Network& net, const AnchorSet& anchors,
                                     UnreachablePolicy policy = UnreachablePolicy::error) {
  for (NodeId a : anchors.ids)
    if (a >= net.size()) throw std::invalid_argument("build_coords: anchor not in network");
  CoordinateSystem cs;
  cs.anchors_ = anchors;
  cs.n_ = net.size();
  const std::size_t dim = anchors.ids.size();
  cs.table_.assign(cs.n_ * dim, 0.0);
  cs.valid_.assign(cs.n_, 1);
  for (std::size_t i = 0; i < dim; ++i) {
    const NodeId a = anchors.ids[i];
    if (anchors.mode == CoordMode::euclidean) {
      for (NodeId u = 0; u < cs.n_; ++u)
        cs.table_[std::size_t(u) * dim + i] = euclidean(net.position(u), net.position(a));
    } else {
      const std::vector<int> hops = bfs_hops(net, a);
      for (NodeId u = 0; u < cs.n_; ++u) {
        if (hops[u] == kUnreachable) {
          if (policy == UnreachablePolicy::error) throw CoordBuildError(u, a);
          cs.valid_[u] = 0;
        } else {
          cs.table_[std::size_t(u) * dim + i] = double(hops[u]);
          ++cs.flood_messages_;
        }
      }
    }
  }
  return cs;
}

// Appends `coord <node> c1 .. cn` lines to a graph dump.
inline void dump_coords(const CoordinateSystem& cs, std::ostream& out) {
  char buf[64];
  for (NodeId u = 0; u < cs.node_count(); ++u) {
    if (!cs.has_coords(u)) continue;
    out << "coord " << u;
    for (double c : cs.coord(u)) {
      std::snprintf(buf, sizeof buf, " %.9g", c);
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace anchorroute
