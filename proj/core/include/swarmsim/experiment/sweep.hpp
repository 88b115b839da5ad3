#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "swarmsim/experiment/presets.hpp"
#include "swarmsim/metrics/report.hpp"
#include "swarmsim/swarm/swarm.hpp"

namespace swarmsim {

// Writes the standard per-run report for a finished run.
ReportPaths write_run_report(const std::filesystem::path& dir, const ScenarioConfig& cfg,
                             const RunResult& result);

struct SweepOptions {
  std::size_t jobs = 1;
  // Each point runs once per seed.
  std::vector<std::uint64_t> seeds = {1};
  // Per-run reports go to <out_dir>/runs/ when set.
  std::filesystem::path out_dir;
  // Called from worker threads after each run; must be thread-safe.
  std::function<void(const std::string& run_id, const RunStats&)> on_done;
};

struct SweepOutcome {
  std::size_t point = 0;
  std::uint64_t seed = 0;
  std::string run_id;
  std::vector<SummaryRow> summary;
  RunStats stats;
  // Only kept when requested; large at paper scale.
  std::vector<NodeRecord> records;
};

// Runs every (point, seed) pair on up to `jobs` threads. Results come back
// in (point, seed) order regardless of scheduling. The first exception from
// any run is rethrown after all workers stop.
std::vector<SweepOutcome> run_sweep(const std::vector<SweepPoint>& points,
                                    const SweepOptions& options, bool keep_records = false);

// {preset}_sweep.csv: keys..., seed, role, metric, value, one row per run
// and summary metric. {preset}_aggregate.csv: keys..., role, metric, n,
// mean, stddev, ci95_normal, ci95_sigma across seeds.
void write_sweep_reports(const std::filesystem::path& dir, const ExperimentPreset& preset,
                         const std::vector<SweepOutcome>& outcomes);

}  // namespace swarmsim
