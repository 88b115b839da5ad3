// swarmsim: run one scenario, a named experiment preset, or the scaling
// benchmark. Exit codes: 0 ok, 1 I/O or other runtime failure, 2 bad
// configuration or arguments, 3 simulation invariant violated.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "swarmsim/engine/format.hpp"
#include "swarmsim/experiment/presets.hpp"
#include "swarmsim/experiment/sweep.hpp"
#include "swarmsim/metrics/report.hpp"
#include "swarmsim/swarm/swarm.hpp"

namespace fs = std::filesystem;
using namespace swarmsim;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInvariant = 3;

void apply_overrides(ScenarioConfig& cfg, const std::vector<std::string>& sets) {
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set", "expected key=value, got '" + s + "'");
    set_config_value(cfg, s.substr(0, eq), s.substr(eq + 1));
  }
}

int cmd_run(const std::string& config_path, const fs::path& out,
            std::optional<std::uint64_t> seed, const std::string& trace,
            const std::vector<std::string>& sets) {
  ScenarioConfig cfg = config_path.empty() ? base_config(Scale::kDesk) : load_config(config_path);
  apply_overrides(cfg, sets);
  if (seed) cfg.seed = *seed;
  if (!trace.empty()) cfg.trace_file = trace;
  cfg.validate();
  const RunResult result = Swarm(cfg).run();
  const auto paths = write_run_report(out, cfg, result);
  std::printf("run %s: seed %llu, %llu events, simulated %.0f s, wall %.2f s\n",
              cfg.run_id.c_str(), static_cast<unsigned long long>(cfg.seed),
              static_cast<unsigned long long>(result.stats.events), result.stats.sim_end_s,
              result.stats.wall_s);
  std::printf("summary: %s\n", paths.summary.string().c_str());
  return 0;
}

int cmd_preset(const std::string& name, const std::string& scale_name, const fs::path& out,
               std::uint64_t seed, std::size_t reps, std::size_t jobs, const std::string& trace,
               const std::vector<std::string>& sets) {
  const Scale scale = parse_scale(scale_name);
  ExperimentPreset preset = make_preset(name, scale);
  for (auto& p : preset.points) {
    if (!trace.empty()) p.config.trace_file = trace;
    apply_overrides(p.config, sets);
    p.config.validate();
  }
  SweepOptions opts;
  opts.jobs = jobs;
  opts.seeds.clear();
  for (std::size_t i = 0; i < reps; ++i) opts.seeds.push_back(seed + i);
  opts.out_dir = out;
  std::mutex mu;
  opts.on_done = [&](const std::string& run_id, const RunStats& stats) {
    std::lock_guard lock(mu);
    std::printf("  done %s (%.1f s wall)\n", run_id.c_str(), stats.wall_s);
    std::fflush(stdout);
  };
  std::printf("preset %s: %zu points x %zu seeds on %zu jobs\n", preset.name.c_str(),
              preset.points.size(), reps, jobs);
  const auto outcomes = run_sweep(preset.points, opts);
  write_sweep_reports(out, preset, outcomes);

  std::printf("%-40s %-11s %8s %8s\n", "point", "role", "median_e", "complete");
  for (std::size_t p = 0; p < preset.points.size(); ++p) {
    for (const char* role : {"altruistic", "standard", "leech", "all"}) {
      double sum = 0.0, done = 0.0;
      std::size_t n = 0;
      for (const auto& o : outcomes) {
        if (o.point != p) continue;
        for (const auto& row : o.summary) {
          if (row.role != role) continue;
          if (row.metric == "median_efficiency") {
            sum += row.value;
            ++n;
          } else if (row.metric == "completion_fraction") {
            done += row.value / static_cast<double>(reps);
          }
        }
      }
      if (n == 0) continue;
      std::printf("%-40s %-11s %8.3f %8.3f\n", preset.points[p].label().c_str(), role,
                  sum / static_cast<double>(n), done);
    }
  }
  std::printf("sweep: %s\n", (out / (preset.name + "_sweep.csv")).string().c_str());
  return 0;
}

int cmd_bench(const std::vector<std::size_t>& counts, const fs::path& out) {
  std::vector<std::string> rows;
  std::printf("%8s %12s %10s %14s %14s %12s\n", "nodes", "sim_hours", "wall_s", "events",
              "messages", "memory_mb");
  for (std::size_t n : counts) {
    if (n == 0) throw CLI::ValidationError("--nodes", "node counts must be positive");
    const ScenarioConfig cfg = bench_config(n);
    const RunResult r = Swarm(cfg, bench_population(cfg)).run();
    const auto& s = r.stats;
    const double mem_mb = static_cast<double>(s.memory_estimate_bytes) / 1048576.0;
    std::printf("%8zu %12.2f %10.2f %14llu %14llu %12.2f\n", n, s.sim_end_s / 3600.0, s.wall_s,
                static_cast<unsigned long long>(s.events),
                static_cast<unsigned long long>(s.messages), mem_mb);
    rows.push_back(std::to_string(n) + ',' + format_real(s.sim_end_s / 3600.0) + ',' +
                   format_real(s.wall_s) + ',' + std::to_string(s.events) + ',' +
                   std::to_string(s.messages) + ',' + format_real(mem_mb));
  }
  if (!out.empty()) {
    fs::create_directories(out);
    std::ofstream f(out / "bench.csv");
    if (!f) throw std::runtime_error("cannot write " + (out / "bench.csv").string());
    f << "nodes,sim_hours,wall_s,events,messages,memory_mb\n";
    for (const auto& row : rows) f << row << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"swarmsim: flow-level BitTorrent swarm simulator"};
  app.set_version_flag("--version", std::string(library_version()));
  app.require_subcommand(1);

  std::string config_path, trace, preset_name, scale = "desk";
  fs::path out = "out";
  std::optional<std::uint64_t> seed;
  std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
  std::size_t reps = 1;
  std::vector<std::size_t> bench_nodes = {10, 100};
  std::vector<std::string> sets;

  auto* run = app.add_subcommand("run", "run one scenario and write its report");
  run->add_option("--config", config_path, "scenario file (key = value lines)")
      ->check(CLI::ExistingFile);
  run->add_option("--out", out, "output directory")->capture_default_str();
  run->add_option("--seed", seed, "override run.seed");
  run->add_option("--trace", trace, "join-time trace file, overrides trace.file");
  run->add_option("--set", sets, "override a config key (key=value), repeatable");

  auto* preset = app.add_subcommand("preset", "run a named experiment preset");
  preset->add_option("--preset,name", preset_name, "preset name")->required();
  preset->add_option("--scale", scale, "desk or paper")->capture_default_str();
  preset->add_option("--out", out, "output directory")->capture_default_str();
  preset->add_option("--seed", seed, "first root seed (default 1)");
  preset->add_option("--reps", reps, "seeds per point")->check(CLI::PositiveNumber)
      ->capture_default_str();
  preset->add_option("--jobs", jobs, "parallel runs")->check(CLI::PositiveNumber)
      ->capture_default_str();
  preset->add_option("--trace", trace, "join-time trace file for every point");
  preset->add_option("--set", sets, "override a config key in every point, repeatable");

  auto* bench = app.add_subcommand("bench", "scaling benchmark");
  bench->add_option("--nodes", bench_nodes, "node counts")->delimiter(',')
      ->capture_default_str();
  bench->add_option("--out", out, "directory for bench.csv (optional)");

  auto* list = app.add_subcommand("list", "list presets and configuration keys");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config_path, out, seed, trace, sets);
    if (*preset) return cmd_preset(preset_name, scale, out, seed.value_or(1), reps, jobs, trace, sets);
    if (*bench) return cmd_bench(bench_nodes, bench->count("--out") ? out : fs::path());
    if (*list) {
      std::printf("presets:\n");
      for (const auto& n : preset_names()) {
        std::printf("  %-20s %s\n", n.c_str(), make_preset(n, Scale::kDesk).description.c_str());
      }
      std::printf("config keys:\n");
      for (const auto& [k, d] : config_schema()) std::printf("  %-36s %s\n", k.c_str(), d.c_str());
      return 0;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const UnknownPreset& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const InvariantViolation& e) {
    std::fprintf(stderr, "invariant violated: %s\n", e.what());
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return 0;
}
