#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "anchorroute/sim.hpp"

namespace anchorroute {

struct ConfigError : std::runtime_error {
  int line;
  ConfigError(int ln, const std::string& msg)
      : std::runtime_error("config line " + std::to_string(ln) + ": " + msg), line(ln) {}
};

// Scenario plus the sweep lists parsed from multi-valued keys. seed, n_nodes,
// protocol and mode accept comma lists (and a..b ranges for the numeric two);
// a single value keeps the sweep list empty and only sets the base field.
struct RunConfig {
  Scenario base;
  SweepSpec sweep;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline std::uint64_t parse_u64(std::string_view v, int line) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw ConfigError(line, "expected an unsigned integer, got '" + std::string(v) + "'");
  return out;
}

inline double parse_double(std::string_view v, int line) {
  try {
    std::size_t idx = 0;
    const double out = std::stod(std::string(v), &idx);
    if (idx != v.size()) throw std::invalid_argument("");
    return out;
  } catch (...) {
    throw ConfigError(line, "expected a number, got '" + std::string(v) + "'");
  }
}

inline bool parse_bool(std::string_view v, int line) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(line, "expected true/false, got '" + std::string(v) + "'");
}

// Comma list with a..b inclusive ranges, e.g. "1..3,7" -> 1 2 3 7.
inline std::vector<std::uint64_t> parse_u64_list(std::string_view v, int line) {
  std::vector<std::uint64_t> out;
  std::size_t pos = 0;
  while (pos <= v.size()) {
    const std::size_t comma = std::min(v.find(',', pos), v.size());
    const auto item = trim(v.substr(pos, comma - pos));
    if (item.empty()) throw ConfigError(line, "empty list element");
    const std::size_t dots = item.find("..");
    if (dots == std::string_view::npos) {
      out.push_back(parse_u64(item, line));
    } else {
      const std::uint64_t lo = parse_u64(trim(item.substr(0, dots)), line);
      const std::uint64_t hi = parse_u64(trim(item.substr(dots + 2)), line);
      if (hi < lo) throw ConfigError(line, "descending range");
      for (std::uint64_t x = lo; x <= hi; ++x) out.push_back(x);
    }
    pos = comma + 1;
    if (comma == v.size()) break;
  }
  return out;
}

inline std::vector<std::string> split_list(std::string_view v) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= v.size()) {
    const std::size_t comma = std::min(v.find(',', pos), v.size());
    out.emplace_back(trim(v.substr(pos, comma - pos)));
    pos = comma + 1;
    if (comma == v.size()) break;
  }
  return out;
}

inline Rect parse_rect(std::string_view v, int line) {
  std::istringstream in{std::string(v)};
  Rect r;
  if (!(in >> r.x0 >> r.y0 >> r.x1 >> r.y1) || !(in >> std::ws).eof())
    throw ConfigError(line, "expected 'x0 y0 x1 y1'");
  return r;
}

inline Protocol parse_protocol(std::string_view v, int line) {
  if (v == "greedy") return Protocol::greedy;
  if (v == "roam") return Protocol::roam;
  if (v == "gric") return Protocol::gric;
  throw ConfigError(line, "unknown protocol '" + std::string(v) + "'");
}

inline Metric parse_mode(std::string_view v, int line) {
  if (v == "2d") return Metric::euclid2d;
  if (v == "euclidean") return Metric::anchors_euclid;
  if (v == "hop") return Metric::anchors_hop;
  throw ConfigError(line, "unknown mode '" + std::string(v) + "'");
}

}  // namespace detail

// Applies one `key = value` assignment. Unknown keys are rejected.
inline void apply_config_entry(RunConfig& cfg, std::string_view key, std::string_view value,
                               int line) {
  using namespace detail;
  Scenario& sc = cfg.base;
  if (key == "seed") {
    auto list = parse_u64_list(value, line);
    sc.seed = list.front();
    cfg.sweep.seeds = list.size() > 1 ? list : std::vector<std::uint64_t>{};
  } else if (key == "n_nodes") {
    auto list = parse_u64_list(value, line);
    sc.n_nodes = std::size_t(list.front());
    cfg.sweep.densities.clear();
    if (list.size() > 1)
      cfg.sweep.densities.assign(list.begin(), list.end());
  } else if (key == "protocol") {
    auto items = split_list(value);
    sc.protocol = parse_protocol(items.front(), line);
    cfg.sweep.protocols.clear();
    if (items.size() > 1)
      for (const auto& it : items) cfg.sweep.protocols.push_back(parse_protocol(it, line));
  } else if (key == "mode") {
    auto items = split_list(value);
    sc.mode = parse_mode(items.front(), line);
    cfg.sweep.modes.clear();
    if (items.size() > 1)
      for (const auto& it : items) cfg.sweep.modes.push_back(parse_mode(it, line));
  } else if (key == "field_w") {
    sc.field.width = parse_double(value, line);
  } else if (key == "field_h") {
    sc.field.height = parse_double(value, line);
  } else if (key == "comm_radius") {
    sc.comm_radius = parse_double(value, line);
  } else if (key == "obstacle") {
    sc.obstacle = parse_bool(value, line);
  } else if (key == "obstacle_outer_x") {
    sc.obstacle_outer_x = parse_double(value, line);
  } else if (key == "obstacle_outer_y") {
    sc.obstacle_outer_y = parse_double(value, line);
  } else if (key == "obstacle_outer_radius") {
    sc.obstacle_outer_radius = parse_double(value, line);
  } else if (key == "obstacle_inner_x") {
    sc.obstacle_inner_x = parse_double(value, line);
  } else if (key == "obstacle_inner_y") {
    sc.obstacle_inner_y = parse_double(value, line);
  } else if (key == "obstacle_inner_radius") {
    sc.obstacle_inner_radius = parse_double(value, line);
  } else if (key == "n_anchors") {
    sc.n_anchors = std::size_t(parse_u64(value, line));
  } else if (key == "n_messages") {
    sc.n_messages = std::size_t(parse_u64(value, line));
  } else if (key == "source_zone") {
    sc.source_zone = parse_rect(value, line);
  } else if (key == "dest_zone") {
    sc.dest_zone = parse_rect(value, line);
  } else if (key == "ttl_factor") {
    sc.ttl_factor = parse_double(value, line);
  } else if (key == "ttl_min") {
    sc.ttl_min = std::size_t(parse_u64(value, line));
  } else if (key == "filter_anchors") {
    sc.filter_anchors = parse_bool(value, line);
  } else if (key == "roam_shared_state") {
    sc.roam_shared_state = parse_bool(value, line);
  } else if (key == "gric_alpha") {
    sc.gric_alpha = parse_double(value, line);
  } else {
    throw ConfigError(line, "unknown key '" + std::string(key) + "'");
  }
}

// `key = value` per line, '#' comments, blank lines ignored.
inline void parse_config_text(RunConfig& cfg, std::string_view text) {
  int line = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = std::min(text.find('\n', pos), text.size());
    ++line;
    std::string_view raw = text.substr(pos, nl - pos);
    pos = nl + 1;
    const std::size_t hash = raw.find('#');
    if (hash != std::string_view::npos) raw = raw.substr(0, hash);
    raw = detail::trim(raw);
    if (raw.empty()) {
      if (nl == text.size()) break;
      continue;
    }
    const std::size_t eq = raw.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(line, "expected 'key = value'");
    const auto key = detail::trim(raw.substr(0, eq));
    const auto value = detail::trim(raw.substr(eq + 1));
    if (key.empty()) throw ConfigError(line, "missing key");
    apply_config_entry(cfg, key, value, line);
    if (nl == text.size()) break;
  }
}

inline RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  RunConfig cfg;
  parse_config_text(cfg, ss.str());
  return cfg;
}

namespace detail {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T, typename Fn>
std::string join_list(const std::vector<T>& list, Fn&& fmt) {
  std::string out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (i) out += ',';
    out += fmt(list[i]);
  }
  return out;
}

}  // namespace detail

// Canonical text form; parse(serialize(cfg)) == cfg.
inline std::string serialize_config(const RunConfig& cfg) {
  using namespace detail;
  const Scenario& sc = cfg.base;
  std::string out;
  auto kv = [&out](std::string_view k, const std::string& v) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  };
  kv("seed", cfg.sweep.seeds.empty()
                 ? std::to_string(sc.seed)
                 : join_list(cfg.sweep.seeds,
                             [](std::uint64_t s) { return std::to_string(s); }));
  kv("n_nodes", cfg.sweep.densities.empty()
                    ? std::to_string(sc.n_nodes)
                    : join_list(cfg.sweep.densities,
                                [](std::size_t n) { return std::to_string(n); }));
  kv("protocol",
     cfg.sweep.protocols.empty()
         ? std::string(to_string(sc.protocol))
         : join_list(cfg.sweep.protocols,
                     [](Protocol p) { return std::string(to_string(p)); }));
  kv("mode", cfg.sweep.modes.empty()
                 ? std::string(to_string(sc.mode))
                 : join_list(cfg.sweep.modes,
                             [](Metric m) { return std::string(to_string(m)); }));
  kv("field_w", fmt_double(sc.field.width));
  kv("field_h", fmt_double(sc.field.height));
  kv("comm_radius", fmt_double(sc.comm_radius));
  kv("obstacle", sc.obstacle ? "true" : "false");
  kv("obstacle_outer_x", fmt_double(sc.obstacle_outer_x));
  kv("obstacle_outer_y", fmt_double(sc.obstacle_outer_y));
  kv("obstacle_outer_radius", fmt_double(sc.obstacle_outer_radius));
  kv("obstacle_inner_x", fmt_double(sc.obstacle_inner_x));
  kv("obstacle_inner_y", fmt_double(sc.obstacle_inner_y));
  kv("obstacle_inner_radius", fmt_double(sc.obstacle_inner_radius));
  kv("n_anchors", std::to_string(sc.n_anchors));
  kv("n_messages", std::to_string(sc.n_messages));
  kv("source_zone", fmt_double(sc.source_zone.x0) + " " + fmt_double(sc.source_zone.y0) +
                        " " + fmt_double(sc.source_zone.x1) + " " +
                        fmt_double(sc.source_zone.y1));
  kv("dest_zone", fmt_double(sc.dest_zone.x0) + " " + fmt_double(sc.dest_zone.y0) + " " +
                      fmt_double(sc.dest_zone.x1) + " " + fmt_double(sc.dest_zone.y1));
  kv("ttl_factor", fmt_double(sc.ttl_factor));
  kv("ttl_min", std::to_string(sc.ttl_min));
  kv("filter_anchors", sc.filter_anchors ? "true" : "false");
  kv("roam_shared_state", sc.roam_shared_state ? "true" : "false");
  kv("gric_alpha", fmt_double(sc.gric_alpha));
  return out;
}

}  // namespace anchorroute
