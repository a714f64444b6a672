#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "anchorroute/coords.hpp"
#include "anchorroute/routing.hpp"
#include "anchorroute/topology.hpp"

namespace anchorroute {

struct VerifyOptions {
  std::size_t trials = 20000;
  std::uint64_t seed = 20240901;
  bool fault_da_symmetry = false;  // test hook: perturbs one side of the symmetry check
};

struct PropertyResult {
  std::string name;
  bool pass = true;
  std::string detail;
};

namespace verify_detail {

inline std::vector<double> random_vec(Rng& rng, std::size_t dim, double lo, double hi) {
  std::vector<double> v(dim);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

inline std::vector<double> random_unit(Rng& rng, std::size_t dim) {
  for (;;) {
    std::vector<double> v(dim);
    double n2 = 0.0;
    for (double& x : v) {
      x = rng.uniform(-1.0, 1.0);
      n2 += x * x;
    }
    if (n2 > 1e-6) {
      const double n = std::sqrt(n2);
      for (double& x : v) x /= n;
      return v;
    }
  }
}

inline std::string fail_at(std::uint64_t seed, std::size_t trial) {
  return "counterexample at seed " + std::to_string(seed) + ", trial " +
         std::to_string(trial);
}

}  // namespace verify_detail

inline std::vector<PropertyResult> run_property_suite(const VerifyOptions& opt) {
  using namespace verify_detail;
  std::vector<PropertyResult> results;
  auto prop = [&](const std::string& name, auto&& body) {
    PropertyResult r{name, true, ""};
    body(r);
    if (r.pass && r.detail.empty())
      r.detail = std::to_string(opt.trials) + " trials";
    results.push_back(std::move(r));
  };

  prop("da_nonneg", [&](PropertyResult& r) {
    Rng rng(Rng::derive(opt.seed, 11));
    for (std::size_t i = 0; i < opt.trials; ++i) {
      const std::size_t dim = 1 + rng.below(10);
      const auto u = random_vec(rng, dim, 0.0, 100.0);
      const auto v = random_vec(rng, dim, 0.0, 100.0);
      const double d = anchors_distance(u, v);
      if (!(d >= 0.0) || !std::isfinite(d)) {
        r.pass = false;
        r.detail = fail_at(opt.seed, i);
        return;
      }
    }
  });

  prop("da_symmetry", [&](PropertyResult& r) {
    Rng rng(Rng::derive(opt.seed, 12));
    for (std::size_t i = 0; i < opt.trials; ++i) {
      const std::size_t dim = 1 + rng.below(10);
      const auto u = random_vec(rng, dim, 0.0, 100.0);
      const auto v = random_vec(rng, dim, 0.0, 100.0);
      double lhs = anchors_distance(u, v);
      if (opt.fault_da_symmetry) lhs += 1e-6;  // injected fault
      if (std::abs(lhs - anchors_distance(v, u)) > 1e-9) {
        r.pass = false;
        r.detail = fail_at(opt.seed, i);
        return;
      }
    }
  });

  prop("da_triangle", [&](PropertyResult& r) {
    Rng rng(Rng::derive(opt.seed, 13));
    for (std::size_t i = 0; i < opt.trials; ++i) {
      const std::size_t dim = 1 + rng.below(10);
      const auto u = random_vec(rng, dim, 0.0, 100.0);
      const auto v = random_vec(rng, dim, 0.0, 100.0);
      const auto w = random_vec(rng, dim, 0.0, 100.0);
      if (anchors_distance(u, v) >
          anchors_distance(u, w) + anchors_distance(w, v) + 1e-9) {
        r.pass = false;
        r.detail = fail_at(opt.seed, i);
        return;
      }
    }
  });

  prop("lemma1_general_setting", [&](PropertyResult& r) {
    Rng rng(Rng::derive(opt.seed, 14));
    for (std::size_t i = 0; i < opt.trials; ++i) {
      Point2D a[3];
      do {
        for (auto& p : a) p = {rng.uniform(0.0, 50.0), rng.uniform(0.0, 50.0)};
      } while (!is_general_setting(std::span<const Point2D>(a, 3)));
      Point2D u{rng.uniform(0.0, 50.0), rng.uniform(0.0, 50.0)};
      Point2D v{rng.uniform(0.0, 50.0), rng.uniform(0.0, 50.0)};
      if (euclidean(u, v) < 1e-3) continue;
      std::vector<double> fu(3), fv(3);
      for (int k = 0; k < 3; ++k) {
        fu[k] = euclidean(u, a[k]);
        fv[k] = euclidean(v, a[k]);
      }
      if (anchors_distance(fu, fv) <= 1e-9) {
        r.pass = false;
        r.detail = fail_at(opt.seed, i);
        return;
      }
    }
  });

  prop("lemma1_collinear_witness", [&](PropertyResult& r) {
    Rng rng(Rng::derive(opt.seed, 15));
    const std::size_t rounds = std::max<std::size_t>(1, opt.trials / 100);
    for (std::size_t i = 0; i < rounds; ++i) {
      // Anchors on the x axis; mirroring across it preserves every distance
      // bit-for-bit, so the constructed pair must collide exactly.
      Point2D a[3] = {{rng.uniform(0.0, 50.0), 0.0},
                      {rng.uniform(0.0, 50.0), 0.0},
                      {rng.uniform(0.0, 50.0), 0.0}};
      if (is_general_setting(std::span<const Point2D>(a, 3))) {
        r.pass = false;
        r.detail = "collinear anchors classified as general setting";
        return;
      }
      const Point2D u{rng.uniform(0.0, 50.0), rng.uniform(0.1, 25.0)};
      const Point2D v{u.x, -u.y};
      std::vector<double> fu(3), fv(3);
      for (int k = 0; k < 3; ++k) {
        fu[k] = euclidean(u, a[k]);
        fv[k] = euclidean(v, a[k]);
      }
      if (anchors_distance(fu, fv) != 0.0) {
        r.pass = false;
        r.detail = fail_at(opt.seed, i);
        return;
      }
    }
    r.detail = std::to_string(rounds) + " witnesses";
  });

  prop("frame_orthonormality", [&](PropertyResult& r) {
    Rng rng(Rng::derive(opt.seed, 16));
    // Star networks, one per neighbor count; coordinates are re-rolled per trial.
    std::vector<Network> stars;
    for (std::size_t k = 2; k <= 8; ++k) {
      std::vector<Point2D> pos(k + 1, Point2D{0.0, 0.0});
      std::vector<std::pair<NodeId, NodeId>> edges;
      for (NodeId v = 1; v <= k; ++v) edges.emplace_back(0, v);
      stars.emplace_back(std::move(pos), edges, 1.0, FieldSize{1.0, 1.0});
    }
    for (std::size_t i = 0; i < opt.trials; ++i) {
      const std::size_t k = 2 + rng.below(7);
      const Network& net = stars[k - 2];
      const std::size_t dim = 2 + rng.below(5);
      std::vector<double> table((k + 1) * dim);
      for (double& x : table) x = rng.uniform(0.0, 10.0);
      DistanceView view(table.data(), k + 1, dim, Metric::anchors_euclid);
      const auto d_last = random_unit(rng, dim);
      const auto dest = random_vec(rng, dim, 0.0, 10.0);
      std::vector<double> p_east;
      if (rng.below(4) != 0) p_east = random_unit(rng, dim);
      const auto frame = vgric_frame(view, net, 0, d_last, dest, p_east);
      if (!frame) continue;
      using detail::dot;
      using detail::norm;
      if (std::abs(norm(frame->v_north) - 1.0) > 1e-9 ||
          std::abs(norm(frame->v_east) - 1.0) > 1e-9 ||
          std::abs(dot(frame->v_north, frame->v_east)) > 1e-6 ||
          (!p_east.empty() && dot(frame->v_east, p_east) < 0.0)) {
        r.pass = false;
        r.detail = fail_at(opt.seed, i);
        return;
      }
    }
  });

  prop("rotation_isometry", [&](PropertyResult& r) {
    Rng rng(Rng::derive(opt.seed, 17));
    for (std::size_t i = 0; i < opt.trials; ++i) {
      const std::size_t dim = 2 + rng.below(5);
      auto v_north = random_unit(rng, dim);
      auto v_east = random_unit(rng, dim);
      const double ov = detail::dot(v_east, v_north);
      for (std::size_t k = 0; k < dim; ++k) v_east[k] -= ov * v_north[k];
      if (!detail::normalize(v_east, 1e-6)) continue;
      const auto d_last = random_unit(rng, dim);
      const double alpha = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const auto ideal = vgric_ideal(d_last, v_north, v_east, alpha);
      double x = detail::dot(d_last, v_east);
      const double y = detail::dot(d_last, v_north);
      if (x < 0.0) x = -x;
      const double ce = std::cos(alpha) * x - std::sin(alpha) * y;
      const double cn = std::cos(alpha) * y + std::sin(alpha) * x;
      if (ce < 0.0 && cn > 0.0) {
        // Clamp branch: result must be exactly v_north.
        if (ideal != v_north) {
          r.pass = false;
          r.detail = fail_at(opt.seed, i);
          return;
        }
      } else {
        const double want = std::hypot(x, y);
        if (std::abs(detail::norm(ideal) - want) > 1e-9 * std::max(1.0, want)) {
          r.pass = false;
          r.detail = fail_at(opt.seed, i);
          return;
        }
      }
    }
  });

  prop("greedy_matches_argmin", [&](PropertyResult& r) {
    Rng rng(Rng::derive(opt.seed, 18));
    const Network net = deploy(97, 300, FieldSize{20.0, 20.0}, 2.5);
    const auto table = position_table(net);
    const DistanceView view = make_view_2d(table);
    const std::size_t trials = std::min<std::size_t>(opt.trials, 20000);
    for (std::size_t i = 0; i < trials; ++i) {
      const NodeId u = NodeId(rng.below(net.size()));
      const NodeId t = NodeId(rng.below(net.size()));
      const auto dest = view.coord(t);
      const auto got = greedy_step(view, net, u, dest);
      // Independent argmin, iterated in reverse with non-strict comparison.
      std::optional<NodeId> want;
      double best = std::numeric_limits<double>::infinity();
      const auto nb = net.neighbors(u);
      for (std::size_t j = nb.size(); j-- > 0;) {
        const NodeId v = nb[j];
        const double dx = net.position(v).x - net.position(t).x;
        const double dy = net.position(v).y - net.position(t).y;
        const double d = std::sqrt(dx * dx + dy * dy);
        if (d <= best) {
          best = d;
          want = v;
        }
      }
      const double du = euclidean(net.position(u), net.position(t));
      if (!(best < du)) want.reset();
      if (got != want) {
        r.pass = false;
        r.detail = fail_at(opt.seed, i);
        return;
      }
    }
    r.detail = std::to_string(trials) + " trials";
  });

  prop("roam_fixpoint_sound", [&](PropertyResult& r) {
    Rng rng(Rng::derive(opt.seed, 19));
    const std::size_t nets = std::max<std::size_t>(2, std::min<std::size_t>(10, opt.trials / 2000));
    for (std::size_t i = 0; i < nets; ++i) {
      const CrescentObstacle obs{{10.0, 10.0}, 5.0, {7.5, 10.0}, 4.0};
      const Network net = deploy(1000 + i, 150, FieldSize{20.0, 20.0}, 2.2, obs);
      const auto table = position_table(net);
      const DistanceView view = make_view_2d(table);
      const NodeId dest = NodeId(rng.below(net.size()));
      std::vector<double> dc(view.coord(dest).begin(), view.coord(dest).end());

      std::vector<NodeId> order(net.size());
      std::iota(order.begin(), order.end(), 0u);
      std::vector<std::uint8_t> reference;
      for (int perm = 0; perm < 3; ++perm) {
        for (std::size_t j = order.size(); j > 1; --j)
          std::swap(order[j - 1], order[rng.below(j)]);
        RoamState st(net.size(), dest, dc);
        bool changed = true;
        while (changed) {
          changed = false;
          for (NodeId u : order)
            if (dead_end_evaluate(view, net, u, st) > 0) changed = true;
        }
        for (NodeId u = 0; u < net.size(); ++u) {
          if (st.marked[u] || u == dest) continue;
          const double du = view.distance(u, dc);
          bool ok = false;
          for (NodeId v : net.neighbors(u))
            if (!st.marked[v] && view.distance(v, dc) < du) ok = true;
          if (!ok) {
            r.pass = false;
            r.detail = "unsound marking, net seed " + std::to_string(1000 + i);
            return;
          }
        }
        if (perm == 0) {
          reference = st.marked;
        } else if (st.marked != reference) {
          r.pass = false;
          r.detail = "fixed point depends on evaluation order, net seed " +
                     std::to_string(1000 + i);
          return;
        }
      }
    }
    r.detail = std::to_string(nets) + " networks x 3 orders";
  });

  return results;
}

}  // namespace anchorroute
