#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "anchorroute/coords.hpp"
#include "anchorroute/routing.hpp"
#include "anchorroute/topology.hpp"

namespace anchorroute {

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

  bool contains(const Point2D& p) const {
    return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
  }
  friend bool operator==(const Rect&, const Rect&) = default;
};

// One experiment: deployment, anchors, message batch, protocol. Every random
// draw in run() derives from `seed`, and the deployment/anchor/message draws
// are independent of protocol and mode so matched-seed runs compare the same
// network and the same message pairs across protocol variants.
struct Scenario {
  std::uint64_t seed = 1;
  std::size_t n_nodes = 2000;
  FieldSize field{50.0, 50.0};
  double comm_radius = 2.0;

  bool obstacle = true;
  double obstacle_outer_x = 25.0, obstacle_outer_y = 25.0, obstacle_outer_radius = 12.0;
  double obstacle_inner_x = 19.0, obstacle_inner_y = 25.0, obstacle_inner_radius = 10.0;

  std::size_t n_anchors = 6;
  Metric mode = Metric::anchors_hop;
  Protocol protocol = Protocol::roam;
  std::size_t n_messages = 200;
  Rect source_zone{0.0, 20.0, 10.0, 30.0};
  Rect dest_zone{40.0, 20.0, 50.0, 30.0};

  double ttl_factor = 10.0;
  std::size_t ttl_min = 100;
  bool filter_anchors = false;
  bool roam_shared_state = true;
  double gric_alpha = 0.3 * std::numbers::pi;

  std::optional<CrescentObstacle> make_obstacle() const {
    if (!obstacle) return std::nullopt;
    return CrescentObstacle{{obstacle_outer_x, obstacle_outer_y},
                            obstacle_outer_radius,
                            {obstacle_inner_x, obstacle_inner_y},
                            obstacle_inner_radius};
  }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MessageRecord {
  NodeId source = 0;
  NodeId dest = 0;
  RouteOutcome::Status status = RouteOutcome::Status::failed_stuck;
  std::size_t path_hops = 0;  // meaningful when delivered
  int shortest_hops = kUnreachable;
  double stretch = std::numeric_limits<double>::quiet_NaN();
};

struct RunReport {
  std::string protocol;
  std::string mode;
  std::size_t n_nodes = 0;
  std::uint64_t seed = 0;
  double avg_neighbors = 0.0;

  std::vector<MessageRecord> messages;
  std::size_t delivered = 0;
  std::size_t failed = 0;
  double delivery_rate = 0.0;
  double mean_stretch = std::numeric_limits<double>::quiet_NaN();
  double median_stretch = std::numeric_limits<double>::quiet_NaN();
  std::size_t marked_nodes = 0;
  std::uint64_t flood_messages = 0;
  double wall_seconds = 0.0;  // informational; never serialized
  std::string error;          // nonempty when the run failed outright
};

namespace detail {

inline void validate_zone(const Scenario& sc, const Rect& z, const char* name) {
  if (z.x0 > z.x1 || z.y0 > z.y1)
    throw ScenarioError(std::string(name) + ": empty rectangle");
  if (z.x0 < 0 || z.y0 < 0 || z.x1 > sc.field.width || z.y1 > sc.field.height)
    throw ScenarioError(std::string(name) + ": outside the field");
  if (const auto obs = sc.make_obstacle(); obs && !obs->empty()) {
    const double cx = std::clamp(obs->outer_center.x, z.x0, z.x1);
    const double cy = std::clamp(obs->outer_center.y, z.y0, z.y1);
    const bool meets_outer =
        euclidean({cx, cy}, obs->outer_center) <= obs->outer_radius;
    bool inside_hole = true;
    for (const Point2D corner :
         {Point2D{z.x0, z.y0}, Point2D{z.x1, z.y0}, Point2D{z.x0, z.y1}, Point2D{z.x1, z.y1}})
      inside_hole = inside_hole &&
                    euclidean(corner, obs->inner_center) < obs->inner_radius;
    if (meets_outer && !inside_hole)
      throw ScenarioError(std::string(name) + ": overlaps the obstacle");
  }
}

inline void validate_trace(const Network& net, const Message& msg, const RouteOutcome& out) {
  if (out.trace.empty() || out.trace.front() != msg.source)
    throw std::logic_error("trace does not begin at the source");
  if (out.trace.size() > msg.ttl + 1) throw std::logic_error("trace exceeds ttl");
  for (std::size_t i = 1; i < out.trace.size(); ++i) {
    const auto nb = net.neighbors(out.trace[i - 1]);
    if (std::find(nb.begin(), nb.end(), out.trace[i]) == nb.end())
      throw std::logic_error("trace hops between non-adjacent nodes");
  }
  if (out.delivered() && out.trace.back() != msg.dest)
    throw std::logic_error("delivered trace does not end at the destination");
}

}  // namespace detail

// The deterministic preamble shared by run() and the dump command: the
// deployed network, the anchors (drawn from the largest component, since a
// flooding anchor on an islet could not announce itself to the rest of the
// network), and the active coordinate table.
struct ScenarioArtifacts {
  Network net;
  AnchorSet anchors;
  std::vector<double> postable;          // 2d mode coordinate storage
  std::optional<CoordinateSystem> cs;    // anchor modes
  Metric metric = Metric::euclid2d;
};

inline DistanceView make_scenario_view(const ScenarioArtifacts& art) {
  return art.cs ? make_view(*art.cs) : make_view_2d(art.postable);
}

inline ScenarioArtifacts build_artifacts(const Scenario& sc) {
  Network net = deploy(sc.seed, sc.n_nodes, sc.field, sc.comm_radius, sc.make_obstacle());

  const auto [comp, comp_sizes] = components(net);
  const int giant =
      int(std::max_element(comp_sizes.begin(), comp_sizes.end()) - comp_sizes.begin());
  std::vector<NodeId> giant_nodes;
  for (NodeId u = 0; u < net.size(); ++u)
    if (comp[u] == giant) giant_nodes.push_back(u);

  AnchorSet anchors = select_anchors_from(
      giant_nodes, std::min(sc.n_anchors, giant_nodes.size()), sc.seed,
      sc.mode == Metric::anchors_hop ? CoordMode::hop : CoordMode::euclidean);

  ScenarioArtifacts art{std::move(net), std::move(anchors), {}, std::nullopt, sc.mode};
  if (sc.mode == Metric::euclid2d)
    art.postable = position_table(art.net);
  else
    art.cs = build_coords(art.net, art.anchors, UnreachablePolicy::drop);
  return art;
}

// Executes one scenario. Pure function of the scenario: reruns produce an
// identical report (wall_seconds aside). trace_sink, when given, receives
// every message's trace in batch order.
inline RunReport run(const Scenario& sc,
                     std::vector<std::vector<NodeId>>* trace_sink = nullptr) {
  const auto t_start = std::chrono::steady_clock::now();
  if (sc.n_messages < 1) throw ScenarioError("n_messages must be >= 1");
  detail::validate_zone(sc, sc.source_zone, "source_zone");
  detail::validate_zone(sc, sc.dest_zone, "dest_zone");

  RunReport rep;
  rep.protocol = to_string(sc.protocol);
  rep.mode = to_string(sc.mode);
  rep.n_nodes = sc.n_nodes;
  rep.seed = sc.seed;

  const ScenarioArtifacts art = build_artifacts(sc);
  const Network& net = art.net;
  rep.avg_neighbors = net.average_degree();
  if (art.cs) rep.flood_messages = art.cs->flood_messages();
  std::optional<DistanceView> view = make_scenario_view(art);

  std::vector<NodeId> src_nodes, dst_nodes;
  for (NodeId u = 0; u < net.size(); ++u) {
    if (sc.source_zone.contains(net.position(u))) src_nodes.push_back(u);
    if (sc.dest_zone.contains(net.position(u))) dst_nodes.push_back(u);
  }
  if (src_nodes.empty()) throw ScenarioError("source_zone contains no nodes");
  if (dst_nodes.empty()) throw ScenarioError("dest_zone contains no nodes");

  Rng pair_rng(Rng::derive(sc.seed, /*tag=*/0x03));
  std::vector<std::pair<NodeId, NodeId>> pairs;
  pairs.reserve(sc.n_messages);
  for (std::size_t m = 0; m < sc.n_messages; ++m) {
    NodeId s = 0, t = 0;
    bool ok = false;
    for (int tries = 0; tries < 100; ++tries) {
      s = src_nodes[pair_rng.below(src_nodes.size())];
      t = dst_nodes[pair_rng.below(dst_nodes.size())];
      if (s != t) {
        ok = true;
        break;
      }
    }
    if (!ok) throw ScenarioError("zones admit only identical source/dest pairs");
    pairs.emplace_back(s, t);
  }

  std::map<NodeId, std::vector<int>> bfs_cache;
  std::map<NodeId, RoamState> roam_states;
  const RouteOptions opts{sc.filter_anchors, sc.gric_alpha};

  std::vector<double> stretches;
  for (auto [s, t] : pairs) {
    MessageRecord rec;
    rec.source = s;
    rec.dest = t;

    auto it = bfs_cache.find(t);
    if (it == bfs_cache.end()) it = bfs_cache.emplace(t, bfs_hops(net, t)).first;
    rec.shortest_hops = it->second[s];

    Message msg;
    msg.source = s;
    msg.dest = t;
    msg.ttl = rec.shortest_hops == kUnreachable
                  ? sc.ttl_min
                  : std::max<std::size_t>(
                        sc.ttl_min,
                        std::size_t(std::ceil(sc.ttl_factor * rec.shortest_hops)));

    if (!view->has_coord(t)) {
      rec.status = RouteOutcome::Status::failed_no_coords;
      rep.messages.push_back(rec);
      ++rep.failed;
      if (trace_sink) trace_sink->push_back({s});
      continue;
    }
    const auto tc = view->coord(t);
    msg.dest_coord.assign(tc.begin(), tc.end());

    RouteOutcome out;
    if (sc.protocol == Protocol::roam) {
      if (sc.roam_shared_state) {
        auto [rs, inserted] =
            roam_states.try_emplace(t, net.size(), t, msg.dest_coord);
        out = route(sc.protocol, *view, net, msg, &rs->second, opts);
      } else {
        RoamState local(net.size(), t, msg.dest_coord);
        out = route(sc.protocol, *view, net, msg, &local, opts);
        rep.marked_nodes += dead_end_zone_size(local);
      }
    } else {
      out = route(sc.protocol, *view, net, msg, nullptr, opts);
    }
    detail::validate_trace(net, msg, out);
    if (trace_sink) trace_sink->push_back(out.trace);

    rec.status = out.status;
    if (out.delivered()) {
      rec.path_hops = out.trace.size() - 1;
      rec.stretch = double(rec.path_hops) / double(rec.shortest_hops);
      stretches.push_back(rec.stretch);
      ++rep.delivered;
    } else {
      ++rep.failed;
    }
    rep.messages.push_back(rec);
  }
  if (sc.protocol == Protocol::roam && sc.roam_shared_state)
    for (const auto& [t, st] : roam_states) rep.marked_nodes += dead_end_zone_size(st);

  rep.delivery_rate = double(rep.delivered) / double(sc.n_messages);
  if (!stretches.empty()) {
    double sum = 0.0;
    for (double v : stretches) sum += v;
    rep.mean_stretch = sum / double(stretches.size());
    std::sort(stretches.begin(), stretches.end());
    const std::size_t h = stretches.size() / 2;
    rep.median_stretch = stretches.size() % 2 ? stretches[h]
                                              : 0.5 * (stretches[h - 1] + stretches[h]);
  }
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return rep;
}

// Cross product of densities, seeds and protocol variants. Runs are
// independent; `jobs` workers may execute them concurrently and the report
// order never depends on scheduling. Per-run failures land in the report's
// error field and do not stop the sweep.
struct SweepSpec {
  std::vector<std::size_t> densities;
  std::vector<std::uint64_t> seeds;
  std::vector<Protocol> protocols;
  std::vector<Metric> modes;

  friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

inline std::vector<RunReport> sweep(const Scenario& base, const SweepSpec& spec,
                                    unsigned jobs = 1) {
  const auto densities =
      spec.densities.empty() ? std::vector<std::size_t>{base.n_nodes} : spec.densities;
  const auto seeds =
      spec.seeds.empty() ? std::vector<std::uint64_t>{base.seed} : spec.seeds;
  const auto protocols =
      spec.protocols.empty() ? std::vector<Protocol>{base.protocol} : spec.protocols;
  const auto modes = spec.modes.empty() ? std::vector<Metric>{base.mode} : spec.modes;
  if (densities.empty() || seeds.empty())
    throw ScenarioError("sweep: densities and seeds must be nonempty");

  std::vector<Scenario> scenarios;
  for (std::size_t n : densities)
    for (std::uint64_t s : seeds)
      for (Protocol p : protocols)
        for (Metric m : modes) {
          Scenario sc = base;
          sc.n_nodes = n;
          sc.seed = s;
          sc.protocol = p;
          sc.mode = m;
          scenarios.push_back(sc);
        }

  std::vector<RunReport> reports(scenarios.size());
  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, scenarios.size()));
  std::atomic<std::size_t> cursor{0};
  auto worker = [&] {
    for (std::size_t i = cursor.fetch_add(1); i < scenarios.size();
         i = cursor.fetch_add(1)) {
      try {
        reports[i] = run(scenarios[i]);
      } catch (const std::exception& e) {
        reports[i].protocol = to_string(scenarios[i].protocol);
        reports[i].mode = to_string(scenarios[i].mode);
        reports[i].n_nodes = scenarios[i].n_nodes;
        reports[i].seed = scenarios[i].seed;
        reports[i].error = e.what();
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return reports;
}

inline constexpr const char* kCsvHeader =
    "protocol,mode,n_nodes,avg_neighbors,seed,delivery_rate,mean_stretch,"
    "median_stretch,marked_nodes,messages";

// One row per successful run, in report order.
inline void write_csv(const std::vector<RunReport>& reports, std::ostream& out) {
  out << kCsvHeader << '\n';
  char buf[320];
  for (const auto& r : reports) {
    if (!r.error.empty()) continue;
    std::snprintf(buf, sizeof buf, "%s,%s,%zu,%.6g,%llu,%.6g,%.6g,%.6g,%zu,%zu\n",
                  r.protocol.c_str(), r.mode.c_str(), r.n_nodes, r.avg_neighbors,
                  static_cast<unsigned long long>(r.seed), r.delivery_rate,
                  r.mean_stretch, r.median_stretch, r.marked_nodes, r.messages.size());
    out << buf;
  }
}

// `anchor <node_id>` line per anchor, in coordinate-index order.
inline void dump_anchors(const AnchorSet& anchors, std::ostream& out) {
  for (NodeId a : anchors.ids) out << "anchor " << a << '\n';
}

// Full scenario picture: topology, anchors, coordinates (anchor modes only).
inline void dump_scenario(const ScenarioArtifacts& art, std::ostream& out) {
  dump_graph(art.net, out);
  dump_anchors(art.anchors, out);
  if (art.cs) dump_coords(*art.cs, out);
}

// `path <id> <id> ...` line per message trace, for plotting overlays.
inline void dump_traces(const std::vector<std::vector<NodeId>>& traces, std::ostream& out) {
  for (const auto& trace : traces) {
    out << "path";
    for (NodeId u : trace) out << ' ' << u;
    out << '\n';
  }
}

}  // namespace anchorroute
