#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "anchorroute/coords.hpp"
#include "anchorroute/topology.hpp"

namespace anchorroute {

enum class Protocol { greedy, roam, gric };
enum class Metric { euclid2d, anchors_euclid, anchors_hop };

inline const char* to_string(Protocol p) {
  switch (p) {
    case Protocol::greedy: return "greedy";
    case Protocol::roam: return "roam";
    default: return "gric";
  }
}
inline const char* to_string(Metric m) {
  switch (m) {
    case Metric::euclid2d: return "2d";
    case Metric::anchors_euclid: return "euclidean";
    default: return "hop";
  }
}

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}
inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }
inline bool normalize(std::vector<double>& a, double tol) {
  const double n = norm(a);
  if (n <= tol) return false;
  for (double& x : a) x /= n;
  return true;
}

}  // namespace detail

// Uniform coordinate accessor for all three metrics. The distance between
// two nodes is always the L2 norm of their coordinate difference; plain 2D
// routing is the 2-component special case over true positions. An optional
// index filter restricts which components take part (in-route anchor
// selection); an empty filter means all components. The view does not own
// the coordinate storage.
class DistanceView {
 public:
  DistanceView(const double* table, std::size_t n, std::size_t dim, Metric metric,
               const std::uint8_t* valid = nullptr)
      : table_(table), n_(n), dim_(dim), metric_(metric), valid_(valid) {}

  std::size_t size() const { return n_; }
  std::size_t dimension() const { return dim_; }
  Metric metric() const { return metric_; }

  bool has_coord(NodeId u) const { return valid_ == nullptr || valid_[u]; }
  std::span<const double> coord(NodeId u) const {
    return {table_ + std::size_t(u) * dim_, dim_};
  }

  double distance(NodeId u, std::span<const double> target) const {
    if (filter_.empty()) return anchors_distance(coord(u), target);
    return anchors_distance_filtered(coord(u), target, filter_);
  }
  double distance_between(NodeId u, NodeId v) const { return distance(u, coord(v)); }

  void set_filter(std::vector<std::size_t> kept) { filter_ = std::move(kept); }
  void clear_filter() { filter_.clear(); }
  const std::vector<std::size_t>& filter() const { return filter_; }

 private:
  const double* table_;
  std::size_t n_;
  std::size_t dim_;
  Metric metric_;
  const std::uint8_t* valid_;
  std::vector<std::size_t> filter_;
};

inline std::vector<double> position_table(const Network& net) {
  std::vector<double> t(net.size() * 2);
  for (NodeId u = 0; u < net.size(); ++u) {
    t[2 * u] = net.position(u).x;
    t[2 * u + 1] = net.position(u).y;
  }
  return t;
}

inline DistanceView make_view_2d(const std::vector<double>& table) {
  return DistanceView(table.data(), table.size() / 2, 2, Metric::euclid2d);
}

inline DistanceView make_view(const CoordinateSystem& cs) {
  const Metric m = cs.anchors().mode == CoordMode::euclidean ? Metric::anchors_euclid
                                                             : Metric::anchors_hop;
  return DistanceView(cs.table().data(), cs.node_count(), cs.dimension(), m,
                      cs.validity().data());
}

// The routed unit. trace starts at source; consecutive entries are adjacent
// in the network; at most ttl hops are taken.
struct Message {
  NodeId source = 0;
  NodeId dest = 0;
  std::vector<double> dest_coord;
  std::vector<NodeId> trace;
  std::size_t ttl = 0;
};

inline constexpr NodeId kNoExit = std::numeric_limits<NodeId>::max();

// Per-destination ROAM memory: dead-end marks plus "possible exit" pointers.
// Shared by every message routed to dest_node within a run.
struct RoamState {
  NodeId dest_node = 0;
  std::vector<double> dest_coord;
  std::vector<std::uint8_t> marked;
  std::vector<NodeId> exit_of;
  std::vector<NodeId> marked_list;
  std::vector<double> dist_cache;  // lazy metric distance to dest (unfiltered only)

  RoamState(std::size_t n, NodeId dest, std::vector<double> dcoord)
      : dest_node(dest),
        dest_coord(std::move(dcoord)),
        marked(n, 0),
        exit_of(n, kNoExit),
        dist_cache(n, std::numeric_limits<double>::quiet_NaN()) {}

  std::size_t marked_count() const { return marked_list.size(); }
};

// Number of marked nodes: the dead-end zone surface proxy.
inline std::size_t dead_end_zone_size(const RoamState& state) {
  return state.marked_count();
}

namespace detail {

inline double dist_to_dest(const DistanceView& view, RoamState& st, NodeId v) {
  if (!view.filter().empty()) return view.distance(v, st.dest_coord);
  double& d = st.dist_cache[v];
  if (std::isnan(d)) d = view.distance(v, st.dest_coord);
  return d;
}

// Rebuilds exit pointers for the whole marked region: BFS from the unmarked
// boundary inward, earliest layer first, lowest advertiser id first. Every
// marked node reachable from unmarked territory ends up with an acyclic
// chain that leaves the region.
inline void advertise_exits(const DistanceView& view, const Network& net, RoamState& st) {
  (void)view;
  for (NodeId m : st.marked_list) st.exit_of[m] = kNoExit;
  std::vector<NodeId> frontier;
  std::vector<std::uint8_t> seen(net.size(), 0);  // advertisers already queued
  for (NodeId m : st.marked_list)
    for (NodeId v : net.neighbors(m))
      if (!st.marked[v] && !seen[v]) {
        seen[v] = 1;
        frontier.push_back(v);
      }
  std::sort(frontier.begin(), frontier.end());
  std::vector<NodeId> next;
  while (!frontier.empty()) {
    next.clear();
    for (NodeId x : frontier)
      for (NodeId m : net.neighbors(x))
        if (st.marked[m] && st.exit_of[m] == kNoExit) {
          st.exit_of[m] = x;
          next.push_back(m);
        }
    std::sort(next.begin(), next.end());
    frontier.swap(next);
  }
}

}  // namespace detail

// Dead-end evaluation at u: a node with no unmarked neighbor strictly closer
// to the destination marks itself, and its neighbors re-run the process, to
// a fixed point. The destination itself is never marked. After a wave that
// marked anything, exit advertisement runs over the region. Returns the
// number of nodes newly marked.
inline std::size_t dead_end_evaluate(const DistanceView& view, const Network& net,
                                     NodeId u, RoamState& st) {
  const std::size_t before = st.marked_list.size();
  std::vector<NodeId> work{u};
  while (!work.empty()) {
    const NodeId w = work.back();
    work.pop_back();
    if (st.marked[w] || w == st.dest_node || !view.has_coord(w)) continue;
    const double dw = detail::dist_to_dest(view, st, w);
    bool has_escape = false;
    for (NodeId v : net.neighbors(w)) {
      if (st.marked[v] || !view.has_coord(v)) continue;
      if (detail::dist_to_dest(view, st, v) < dw) {
        has_escape = true;
        break;
      }
    }
    if (has_escape) continue;
    st.marked[w] = 1;
    st.marked_list.push_back(w);
    for (NodeId v : net.neighbors(w)) work.push_back(v);
  }
  const std::size_t newly = st.marked_list.size() - before;
  if (newly > 0) detail::advertise_exits(view, net, st);
  return newly;
}

// Neighbor of u minimizing the metric distance to dest_coord, lowest id on
// ties; nullopt when no eligible neighbor improves strictly on u itself.
template <typename Eligible>
std::optional<NodeId> greedy_step(const DistanceView& view, const Network& net, NodeId u,
                                  std::span<const double> dest_coord, Eligible&& eligible) {
  const double du = view.distance(u, dest_coord);
  double best = du;
  std::optional<NodeId> pick;
  for (NodeId v : net.neighbors(u)) {
    if (!view.has_coord(v) || !eligible(v)) continue;
    const double d = view.distance(v, dest_coord);
    if (d < best) {
      best = d;
      pick = v;
    }
  }
  return pick;
}

inline std::optional<NodeId> greedy_step(const DistanceView& view, const Network& net,
                                         NodeId u, std::span<const double> dest_coord) {
  return greedy_step(view, net, u, dest_coord, [](NodeId) { return true; });
}

// One VROAM forwarding decision: evaluate dead ends at u, then greedy over
// unmarked neighbors, or follow the stored exit when u itself is marked.
inline std::optional<NodeId> roam_step(const DistanceView& view, const Network& net,
                                       NodeId u, const Message&, RoamState& st) {
  dead_end_evaluate(view, net, u, st);
  if (!st.marked[u])
    return greedy_step(view, net, u, st.dest_coord,
                       [&](NodeId v) { return !st.marked[v]; });
  const NodeId exit = st.exit_of[u];
  if (exit == kNoExit) return std::nullopt;
  return exit;
}

// Oriented tangent frame at u. v_north points along the destination
// direction within the plane spanned by the last-hop direction and the
// most-perpendicular neighbor direction; v_east is the in-plane normal,
// oriented consistently with p_east. The pair is returned orthonormal.
struct Frame {
  std::vector<double> v_north;
  std::vector<double> v_east;
};

inline std::optional<Frame> vgric_frame(const DistanceView& view, const Network& net,
                                        NodeId u, std::span<const double> d_last,
                                        std::span<const double> dest_coord,
                                        std::span<const double> p_east) {
  const std::size_t dim = view.dimension();
  const auto cu = view.coord(u);
  std::vector<double> d_dir(dim);
  for (std::size_t k = 0; k < dim; ++k) d_dir[k] = dest_coord[k] - cu[k];

  // i = neighbor direction most perpendicular to the destination direction.
  std::vector<double> gamma(dim), pick_i;
  double best = std::numeric_limits<double>::infinity();
  for (NodeId v : net.neighbors(u)) {
    if (!view.has_coord(v)) continue;
    const auto cv = view.coord(v);
    for (std::size_t k = 0; k < dim; ++k) gamma[k] = cv[k] - cu[k];
    if (!detail::normalize(gamma, 1e-12)) continue;
    const double a = std::abs(detail::dot(d_dir, gamma));
    if (a < best) {
      best = a;
      pick_i = gamma;
    }
  }
  if (pick_i.empty()) return std::nullopt;

  const double tol = 1e-9 * (1.0 + detail::norm(d_dir));
  const double along = detail::dot(d_dir, d_last);
  const double across = detail::dot(d_dir, pick_i);
  std::vector<double> v_north(dim), v_east(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    v_north[k] = along * d_last[k] + across * pick_i[k];
    v_east[k] = across * d_last[k] - along * pick_i[k];
  }
  if (!detail::normalize(v_north, tol)) return std::nullopt;
  // d_last and i need not be orthogonal, so complete the frame explicitly.
  const double overlap = detail::dot(v_east, v_north);
  for (std::size_t k = 0; k < dim; ++k) v_east[k] -= overlap * v_north[k];
  if (!detail::normalize(v_east, tol)) return std::nullopt;
  if (!p_east.empty() && detail::dot(v_east, p_east) < 0.0)
    for (double& x : v_east) x = -x;
  return Frame{std::move(v_north), std::move(v_east)};
}

// Rotates the (east-rectified) last-hop direction by alpha within the frame
// plane; falls back to due north when the rotation overshoots past it.
inline std::vector<double> vgric_ideal(std::span<const double> d_last,
                                       std::span<const double> v_north,
                                       std::span<const double> v_east, double alpha) {
  double x = detail::dot(d_last, v_east);
  const double y = detail::dot(d_last, v_north);
  if (x < 0.0) x = -x;
  const double c = std::cos(alpha), s = std::sin(alpha);
  const double cn = c * y + s * x;  // north component after rotation
  const double ce = c * x - s * y;  // east component after rotation
  std::vector<double> ideal(v_north.size());
  if (ce < 0.0 && cn > 0.0) {
    ideal.assign(v_north.begin(), v_north.end());
    return ideal;
  }
  for (std::size_t k = 0; k < v_north.size(); ++k)
    ideal[k] = cn * v_north[k] + ce * v_east[k];
  return ideal;
}

// Per-message GRIC memory: direction of the last hop plus the previous east
// vector; alpha is the fixed rotation angle for the whole run.
struct GricState {
  std::vector<double> d_last;  // empty before the first hop
  std::vector<double> p_east;  // empty before the first frame
  double alpha = 0.3 * std::numbers::pi;
};

// One VGRIC forwarding decision: frame, ideal direction, then the neighbor
// whose direction aligns best with it. Degenerate frames fall back to a
// plain greedy hop.
inline std::optional<NodeId> vgric_step(const DistanceView& view, const Network& net,
                                        NodeId u, const Message& msg, GricState& gs) {
  if (!view.has_coord(u)) return std::nullopt;
  const std::size_t dim = view.dimension();
  const auto cu = view.coord(u);
  std::vector<double> d_dir(dim);
  for (std::size_t k = 0; k < dim; ++k) d_dir[k] = msg.dest_coord[k] - cu[k];

  if (gs.d_last.empty()) {
    gs.d_last = d_dir;
    if (!detail::normalize(gs.d_last, 1e-12)) gs.d_last.clear();
  }

  std::optional<NodeId> next;
  std::optional<Frame> frame;
  if (!gs.d_last.empty())
    frame = vgric_frame(view, net, u, gs.d_last, msg.dest_coord, gs.p_east);
  if (frame) {
    const auto ideal = vgric_ideal(gs.d_last, frame->v_north, frame->v_east, gs.alpha);
    std::vector<double> gamma(dim);
    double best = -std::numeric_limits<double>::infinity();
    for (NodeId v : net.neighbors(u)) {
      if (!view.has_coord(v)) continue;
      const auto cv = view.coord(v);
      for (std::size_t k = 0; k < dim; ++k) gamma[k] = cv[k] - cu[k];
      if (!detail::normalize(gamma, 1e-12)) continue;
      const double a = detail::dot(gamma, ideal);
      if (a > best) {
        best = a;
        next = v;
      }
    }
    gs.p_east = frame->v_east;
  } else {
    next = greedy_step(view, net, u, msg.dest_coord);
  }
  if (!next) return std::nullopt;

  const auto cn = view.coord(*next);
  std::vector<double> hop(dim);
  for (std::size_t k = 0; k < dim; ++k) hop[k] = cn[k] - cu[k];
  if (detail::normalize(hop, 1e-12)) gs.d_last = std::move(hop);
  return next;
}

struct RouteOptions {
  bool anchor_filter = false;           // in-route anchor selection for greedy/roam
  double gric_alpha = 0.3 * std::numbers::pi;
};

struct RouteOutcome {
  enum class Status { delivered, failed_stuck, failed_ttl, failed_no_exit, failed_no_coords };
  Status status = Status::failed_stuck;
  std::vector<NodeId> trace;

  bool delivered() const { return status == Status::delivered; }
  const char* reason() const {
    switch (status) {
      case Status::delivered: return "delivered";
      case Status::failed_stuck: return "stuck";
      case Status::failed_ttl: return "ttl";
      case Status::failed_no_exit: return "no_exit";
      default: return "no_coords";
    }
  }
};

// Drives a protocol step to termination. Termination is on destination NODE
// IDENTITY: coordinates may collide in hop mode, so a node whose coordinate
// distance to the destination is zero hands the message over only when the
// destination is an actual neighbor.
inline RouteOutcome route(Protocol protocol, DistanceView view, const Network& net,
                          const Message& msg, RoamState* shared_roam = nullptr,
                          const RouteOptions& opts = {}) {
  RouteOutcome out;
  out.trace = {msg.source};
  if (!view.has_coord(msg.source) && msg.source != msg.dest) {
    out.status = RouteOutcome::Status::failed_no_coords;
    return out;
  }

  std::optional<RoamState> local_roam;
  RoamState* roam = shared_roam;
  if (protocol == Protocol::roam && roam == nullptr) {
    local_roam.emplace(net.size(), msg.dest, msg.dest_coord);
    roam = &*local_roam;
  }
  GricState gric;
  gric.alpha = opts.gric_alpha;

  NodeId cur = msg.source;
  for (std::size_t hops = 0; hops <= msg.ttl; ++hops) {
    if (cur == msg.dest) {
      out.status = RouteOutcome::Status::delivered;
      return out;
    }
    if (hops == msg.ttl) break;

    if (opts.anchor_filter && protocol != Protocol::gric) {
      view.set_filter(filter_anchors(view.coord(cur), msg.dest_coord));
      if (view.filter().size() == view.dimension()) view.clear_filter();
    }

    // Identity handoff for coordinate collisions (hop mode).
    if (view.distance(cur, msg.dest_coord) == 0.0) {
      const auto nb = net.neighbors(cur);
      if (std::find(nb.begin(), nb.end(), msg.dest) != nb.end()) {
        out.trace.push_back(msg.dest);
        cur = msg.dest;
        continue;
      }
    }

    std::optional<NodeId> next;
    switch (protocol) {
      case Protocol::greedy:
        next = greedy_step(view, net, cur, msg.dest_coord);
        if (!next) {
          out.status = RouteOutcome::Status::failed_stuck;
          return out;
        }
        break;
      case Protocol::roam:
        next = roam_step(view, net, cur, msg, *roam);
        if (!next) {
          out.status = roam->marked[cur] ? RouteOutcome::Status::failed_no_exit
                                         : RouteOutcome::Status::failed_stuck;
          return out;
        }
        break;
      case Protocol::gric:
        next = vgric_step(view, net, cur, msg, gric);
        if (!next) {
          out.status = RouteOutcome::Status::failed_stuck;
          return out;
        }
        break;
    }
    out.trace.push_back(*next);
    cur = *next;
  }
  out.status = RouteOutcome::Status::failed_ttl;
  return out;
}

}  // namespace anchorroute
