#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "anchorroute/geometry.hpp"
#include "anchorroute/rng.hpp"

namespace anchorroute {

using NodeId = std::uint32_t;

inline constexpr int kUnreachable = -1;

struct FieldSize {
  double width = 0.0;
  double height = 0.0;
};

struct DeployError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Immutable deployment: node positions plus unit-disk adjacency. Two nodes
// are linked iff they are within comm_radius and the obstacle does not cut
// the segment between them. Safe to share read-only across threads.
class Network {
 public:
  // Adjacency taken as given (links may be absent for environmental reasons
  // the caller models itself). Edges are symmetrized and deduplicated.
  Network(std::vector<Point2D> positions,
          const std::vector<std::pair<NodeId, NodeId>>& edges,
          double comm_radius, FieldSize field,
          std::optional<CrescentObstacle> obstacle = std::nullopt,
          std::uint64_t seed = 0)
      : positions_(std::move(positions)),
        comm_radius_(comm_radius),
        field_(field),
        obstacle_(std::move(obstacle)),
        seed_(seed) {
    const NodeId n = static_cast<NodeId>(positions_.size());
    std::vector<std::vector<NodeId>> adj(n);
    for (auto [u, v] : edges) {
      if (u >= n || v >= n) throw std::invalid_argument("edge endpoint out of range");
      if (u == v) throw std::invalid_argument("self loop");
      adj[u].push_back(v);
      adj[v].push_back(u);
    }
    offsets_.assign(n + 1, 0);
    for (NodeId u = 0; u < n; ++u) {
      auto& list = adj[u];
      std::sort(list.begin(), list.end());
      list.erase(std::unique(list.begin(), list.end()), list.end());
      offsets_[u + 1] = offsets_[u] + list.size();
    }
    flat_.reserve(offsets_[n]);
    for (NodeId u = 0; u < n; ++u)
      flat_.insert(flat_.end(), adj[u].begin(), adj[u].end());
  }

  std::size_t size() const { return positions_.size(); }
  const Point2D& position(NodeId u) const { return positions_[u]; }
  const std::vector<Point2D>& positions() const { return positions_; }

  std::span<const NodeId> neighbors(NodeId u) const {
    return {flat_.data() + offsets_[u], flat_.data() + offsets_[u + 1]};
  }
  std::size_t degree(NodeId u) const { return offsets_[u + 1] - offsets_[u]; }
  std::size_t edge_count() const { return flat_.size() / 2; }
  double average_degree() const {
    return positions_.empty() ? 0.0 : double(flat_.size()) / double(positions_.size());
  }

  double comm_radius() const { return comm_radius_; }
  const FieldSize& field() const { return field_; }
  const std::optional<CrescentObstacle>& obstacle() const { return obstacle_; }
  std::uint64_t seed() const { return seed_; }

 private:
  std::vector<Point2D> positions_;
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> flat_;
  double comm_radius_;
  FieldSize field_;
  std::optional<CrescentObstacle> obstacle_;
  std::uint64_t seed_;
};

// Uniform placement over the field minus the obstacle region (rejection
// sampling, total retry budget 1000 * n_nodes), then unit-disk adjacency
// with obstacle-cut links removed. Pure function of its arguments.
inline Network deploy(std::uint64_t seed, std::size_t n_nodes, FieldSize field,
                      double comm_radius,
                      std::optional<CrescentObstacle> obstacle = std::nullopt) {
  if (n_nodes < 1) throw DeployError("deploy: n_nodes must be >= 1");
  if (comm_radius <= 0.0) throw DeployError("deploy: comm_radius must be > 0");
  if (field.width <= 0.0 || field.height <= 0.0)
    throw DeployError("deploy: field must have positive extent");

  Rng rng(Rng::derive(seed, /*tag=*/0x01));
  std::vector<Point2D> pos;
  pos.reserve(n_nodes);
  std::size_t budget = 1000 * n_nodes;
  while (pos.size() < n_nodes) {
    if (budget-- == 0)
      throw DeployError("deploy: rejection sampling budget exhausted; obstacle covers the field");
    Point2D p{rng.uniform(0.0, field.width), rng.uniform(0.0, field.height)};
    if (obstacle && obstacle->contains(p)) continue;
    pos.push_back(p);
  }

  // Uniform grid with cell size = comm_radius keeps candidate pairs local.
  const std::size_t cols = std::max<std::size_t>(1, std::size_t(field.width / comm_radius) + 1);
  const std::size_t rows = std::max<std::size_t>(1, std::size_t(field.height / comm_radius) + 1);
  std::vector<std::vector<NodeId>> cells(cols * rows);
  auto cell_of = [&](const Point2D& p) {
    std::size_t cx = std::min(cols - 1, std::size_t(p.x / comm_radius));
    std::size_t cy = std::min(rows - 1, std::size_t(p.y / comm_radius));
    return cy * cols + cx;
  };
  for (NodeId u = 0; u < n_nodes; ++u) cells[cell_of(pos[u])].push_back(u);

  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId u = 0; u < n_nodes; ++u) {
    const std::size_t cu = cell_of(pos[u]);
    const std::size_t cx = cu % cols, cy = cu / cols;
    for (std::size_t dy = (cy ? cy - 1 : 0); dy <= std::min(rows - 1, cy + 1); ++dy) {
      for (std::size_t dx = (cx ? cx - 1 : 0); dx <= std::min(cols - 1, cx + 1); ++dx) {
        for (NodeId v : cells[dy * cols + dx]) {
          if (v <= u) continue;
          if (euclidean(pos[u], pos[v]) > comm_radius) continue;
          if (obstacle && segment_blocked(pos[u], pos[v], *obstacle)) continue;
          edges.emplace_back(u, v);
        }
      }
    }
  }
  return Network(std::move(pos), edges, comm_radius, field, std::move(obstacle), seed);
}

// Exact hop counts from source; kUnreachable marks nodes in other components.
inline std::vector<int> bfs_hops(const Network& net, NodeId source) {
  if (source >= net.size()) throw std::out_of_range("bfs_hops: source not in network");
  std::vector<int> dist(net.size(), kUnreachable);
  std::vector<NodeId> frontier{source}, next;
  dist[source] = 0;
  int level = 0;
  while (!frontier.empty()) {
    ++level;
    next.clear();
    for (NodeId u : frontier)
      for (NodeId v : net.neighbors(u))
        if (dist[v] == kUnreachable) {
          dist[v] = level;
          next.push_back(v);
        }
    frontier.swap(next);
  }
  return dist;
}

inline int shortest_path_len(const Network& net, NodeId s, NodeId t) {
  if (t >= net.size()) throw std::out_of_range("shortest_path_len: t not in network");
  return bfs_hops(net, s)[t];
}

// Connected components by node; returns component id per node plus sizes.
inline std::pair<std::vector<int>, std::vector<std::size_t>> components(const Network& net) {
  std::vector<int> comp(net.size(), -1);
  std::vector<std::size_t> sizes;
  for (NodeId s = 0; s < net.size(); ++s) {
    if (comp[s] >= 0) continue;
    const int c = static_cast<int>(sizes.size());
    sizes.push_back(0);
    std::vector<NodeId> stack{s};
    comp[s] = c;
    while (!stack.empty()) {
      NodeId u = stack.back();
      stack.pop_back();
      ++sizes[c];
      for (NodeId v : net.neighbors(u))
        if (comp[v] < 0) {
          comp[v] = c;
          stack.push_back(v);
        }
    }
  }
  return {std::move(comp), std::move(sizes)};
}

// Line-oriented dump consumed by external plotting tools:
//   header field W H radius R seed S [obstacle ox oy oR ix iy ir]
//   node <id> <x> <y>
//   edge <u> <v>           (lower id first)
inline void dump_graph(const Network& net, std::ostream& out) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "header field %.9g %.9g radius %.9g seed %llu",
                net.field().width, net.field().height, net.comm_radius(),
                static_cast<unsigned long long>(net.seed()));
  out << buf;
  if (net.obstacle()) {
    const auto& o = *net.obstacle();
    std::snprintf(buf, sizeof buf, " obstacle %.9g %.9g %.9g %.9g %.9g %.9g",
                  o.outer_center.x, o.outer_center.y, o.outer_radius,
                  o.inner_center.x, o.inner_center.y, o.inner_radius);
    out << buf;
  }
  out << '\n';
  for (NodeId u = 0; u < net.size(); ++u) {
    std::snprintf(buf, sizeof buf, "node %u %.9g %.9g\n", u, net.position(u).x,
                  net.position(u).y);
    out << buf;
  }
  for (NodeId u = 0; u < net.size(); ++u)
    for (NodeId v : net.neighbors(u))
      if (u < v) {
        std::snprintf(buf, sizeof buf, "edge %u %u\n", u, v);
        out << buf;
      }
}

}  // namespace anchorroute
