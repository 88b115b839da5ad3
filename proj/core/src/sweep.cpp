#include "swarmsim/experiment/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "swarmsim/engine/format.hpp"

namespace swarmsim {
namespace {

// Membership curves are sampled once a simulated minute before compression.
constexpr double kMembershipStepS = 60.0;

std::vector<std::pair<std::string, std::uint64_t>> counters(const RunStats& s) {
  return {{"events", s.events},
          {"recomputes", s.recomputes},
          {"transfer_events", s.transfer_events},
          {"messages", s.messages},
          {"blocks", s.blocks},
          {"bytes_up", s.bytes_up},
          {"bytes_down", s.bytes_down},
          {"duplicate_bytes", s.duplicate_bytes},
          {"links", s.links},
          {"peak_edges", s.peak_edges}};
}

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

ReportPaths write_run_report(const std::filesystem::path& dir, const ScenarioConfig& cfg,
                             const RunResult& result) {
  RunMetadata meta{cfg.run_id, cfg.seed, library_version(), serialize_config(cfg),
                   counters(result.stats)};
  return emit_report(dir, meta, result.records, cfg.torrent.total_bits(),
                     kMembershipStepS * cfg.time_compression, result.stats.sim_end_s);
}

std::vector<SweepOutcome> run_sweep(const std::vector<SweepPoint>& points,
                                    const SweepOptions& options, bool keep_records) {
  struct Job {
    std::size_t point;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t p = 0; p < points.size(); ++p) {
    for (auto seed : options.seeds) jobs.push_back({p, seed});
  }
  std::vector<SweepOutcome> outcomes(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      {
        std::lock_guard lock(error_mu);
        if (error) return;
      }
      try {
        ScenarioConfig cfg = points[jobs[i].point].config;
        cfg.seed = jobs[i].seed;
        cfg.run_id = points[jobs[i].point].label() + ",seed=" + std::to_string(cfg.seed);
        RunResult result = Swarm(cfg).run();
        if (!options.out_dir.empty()) write_run_report(options.out_dir / "runs", cfg, result);
        SweepOutcome& o = outcomes[i];
        o.point = jobs[i].point;
        o.seed = cfg.seed;
        o.run_id = cfg.run_id;
        o.summary = summary_rows(result.records, cfg.torrent.total_bits());
        o.stats = result.stats;
        if (keep_records) o.records = std::move(result.records);
        if (options.on_done) options.on_done(o.run_id, o.stats);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };

  const std::size_t n_threads = std::max<std::size_t>(1, std::min(options.jobs, jobs.size()));
  std::vector<std::thread> threads;
  for (std::size_t t = 1; t < n_threads; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
  return outcomes;
}

void write_sweep_reports(const std::filesystem::path& dir, const ExperimentPreset& preset,
                         const std::vector<SweepOutcome>& outcomes) {
  std::filesystem::create_directories(dir);
  std::string key_header;
  if (!preset.points.empty()) {
    for (const auto& [k, v] : preset.points.front().keys) key_header += k + ',';
  }
  auto key_cells = [&](std::size_t point) {
    std::string s;
    for (const auto& [k, v] : preset.points[point].keys) s += v + ',';
    return s;
  };

  auto sweep = open_csv(dir / (preset.name + "_sweep.csv"));
  sweep << key_header << "seed,role,metric,value\n";
  // (point, role, metric) -> values across seeds, in first-seen order.
  std::map<std::tuple<std::size_t, std::string, std::string>, std::vector<double>> by_key;
  std::vector<std::tuple<std::size_t, std::string, std::string>> order;
  for (const auto& o : outcomes) {
    for (const auto& row : o.summary) {
      sweep << key_cells(o.point) << o.seed << ',' << row.role << ',' << row.metric << ','
            << format_real(row.value) << '\n';
      auto key = std::make_tuple(o.point, row.role, row.metric);
      auto [it, inserted] = by_key.try_emplace(key);
      if (inserted) order.push_back(key);
      it->second.push_back(row.value);
    }
  }

  auto agg = open_csv(dir / (preset.name + "_aggregate.csv"));
  agg << key_header << "role,metric,n,mean,stddev,ci95_normal,ci95_sigma\n";
  for (const auto& key : order) {
    const auto a = aggregate(by_key[key]);
    agg << key_cells(std::get<0>(key)) << std::get<1>(key) << ',' << std::get<2>(key) << ','
        << a.n << ',' << format_real(a.mean) << ',' << format_real(a.stddev) << ','
        << format_real(a.ci95_normal) << ',' << format_real(a.ci95_sigma) << '\n';
  }
}

}  // namespace swarmsim
