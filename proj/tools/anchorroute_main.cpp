#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "anchorroute/config.hpp"
#include "anchorroute/sim.hpp"
#include "anchorroute/verify.hpp"

namespace {

using namespace anchorroute;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

// Precedence: defaults < ANCHORROUTE_SEED < config file < --set overrides.
RunConfig load_config(const std::string& path, const std::vector<std::string>& sets) {
  RunConfig cfg;
  if (const char* env = std::getenv("ANCHORROUTE_SEED")) {
    apply_config_entry(cfg, "seed", env, 0);
    cfg.sweep.seeds.clear();  // env provides a single scalar
  }
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  parse_config_text(cfg, ss.str());
  for (const auto& kv : sets) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos)
      throw ConfigError(0, "--set expects KEY=VALUE, got '" + kv + "'");
    apply_config_entry(cfg, detail::trim(std::string_view(kv).substr(0, eq)),
                       detail::trim(std::string_view(kv).substr(eq + 1)), 0);
  }
  return cfg;
}

void print_summary(const RunReport& r, std::ostream& out) {
  char buf[320];
  if (!r.error.empty()) {
    std::snprintf(buf, sizeof buf, "run protocol=%s mode=%s n_nodes=%zu seed=%llu ERROR: %s\n",
                  r.protocol.c_str(), r.mode.c_str(), r.n_nodes,
                  (unsigned long long)r.seed, r.error.c_str());
    out << buf;
    return;
  }
  std::snprintf(buf, sizeof buf,
                "run protocol=%s mode=%s n_nodes=%zu seed=%llu avg_nbrs=%.3g "
                "delivered=%zu/%zu mean_stretch=%.4g median_stretch=%.4g marked=%zu "
                "floods=%llu (%.2fs)\n",
                r.protocol.c_str(), r.mode.c_str(), r.n_nodes, (unsigned long long)r.seed,
                r.avg_neighbors, r.delivered, r.messages.size(), r.mean_stretch,
                r.median_stretch, r.marked_nodes, (unsigned long long)r.flood_messages,
                r.wall_seconds);
  out << buf;
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& sets,
            const std::string& out_path, const std::string& traces_path, unsigned jobs) {
  const RunConfig cfg = load_config(config_path, sets);
  const auto reports = sweep(cfg.base, cfg.sweep, jobs);

  std::ostream& summary = out_path.empty() ? std::cerr : std::cout;
  bool any_error = false;
  for (const auto& r : reports) {
    print_summary(r, r.error.empty() ? summary : std::cerr);
    any_error = any_error || !r.error.empty();
  }

  if (out_path.empty()) {
    write_csv(reports, std::cout);
  } else {
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "error: cannot write '" << out_path << "'\n";
      return kExitRuntime;
    }
    write_csv(reports, out);
  }

  if (!traces_path.empty()) {
    if (reports.size() != 1) {
      std::cerr << "error: --traces needs a single-run configuration\n";
      return kExitRuntime;
    }
    std::vector<std::vector<NodeId>> traces;
    Scenario sc = cfg.base;
    run(sc, &traces);
    std::ofstream out(traces_path);
    if (!out) {
      std::cerr << "error: cannot write '" << traces_path << "'\n";
      return kExitRuntime;
    }
    dump_scenario(build_artifacts(sc), out);
    dump_traces(traces, out);
  }
  return any_error ? kExitRuntime : kExitOk;
}

int cmd_dump(const std::string& config_path, const std::vector<std::string>& sets,
             const std::string& out_path) {
  const RunConfig cfg = load_config(config_path, sets);
  const auto art = build_artifacts(cfg.base);
  if (out_path.empty()) {
    dump_scenario(art, std::cout);
    return kExitOk;
  }
  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "error: cannot write '" << out_path << "'\n";
    return kExitRuntime;
  }
  dump_scenario(art, out);
  return kExitOk;
}

int cmd_verify(std::size_t trials, std::uint64_t seed, const std::string& fault) {
  VerifyOptions opt;
  opt.trials = trials;
  opt.seed = seed;
  if (!fault.empty()) {
    if (fault == "da_symmetry") {
      opt.fault_da_symmetry = true;
    } else {
      std::cerr << "error: unknown fault '" << fault << "'\n";
      return kExitConfig;
    }
  }
  const auto results = run_property_suite(opt);
  bool all_pass = true;
  for (const auto& r : results) {
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << " (" << r.detail << ")\n";
    all_pass = all_pass && r.pass;
  }
  return all_pass ? kExitOk : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"anchor-distance geographic routing simulator"};
  app.require_subcommand(1);

  std::string config_path, out_path, traces_path, fault;
  std::vector<std::string> sets;
  unsigned jobs = 1;
  std::size_t trials = 20000;
  std::uint64_t vseed = 20240901;

  auto* run_cmd = app.add_subcommand("run", "execute a scenario or sweep and emit CSV");
  run_cmd->add_option("--config", config_path, "scenario config file")->required();
  run_cmd->add_option("--out", out_path, "CSV output path (default: stdout)");
  run_cmd->add_option("--set", sets, "KEY=VALUE override (repeatable)");
  run_cmd->add_option("--jobs", jobs, "parallel sweep workers");
  run_cmd->add_option("--traces", traces_path, "write scenario dump plus per-message paths");

  auto* dump_cmd = app.add_subcommand("dump", "write topology/anchor/coordinate dump");
  dump_cmd->add_option("--config", config_path, "scenario config file")->required();
  dump_cmd->add_option("--out", out_path, "dump output path (default: stdout)");
  dump_cmd->add_option("--set", sets, "KEY=VALUE override (repeatable)");

  auto* verify_cmd = app.add_subcommand("verify", "run the property suites");
  verify_cmd->add_option("--trials", trials, "trials per property");
  verify_cmd->add_option("--seed", vseed, "property suite seed");
  verify_cmd->add_option("--inject-fault", fault, "test hook: break a named property");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return cmd_run(config_path, sets, out_path, traces_path, jobs);
    if (dump_cmd->parsed()) return cmd_dump(config_path, sets, out_path);
    return cmd_verify(trials, vseed, fault);
  } catch (const anchorroute::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
