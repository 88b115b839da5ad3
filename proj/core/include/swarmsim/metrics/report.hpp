#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "swarmsim/metrics/metrics.hpp"

namespace swarmsim {

struct RunMetadata {
  std::string run_id;
  std::uint64_t seed = 0;
  std::string version;
  std::string config_text;  // serialized ScenarioConfig
  // Deterministic counters (events, messages, ...) in display order.
  std::vector<std::pair<std::string, std::uint64_t>> counters;
};

struct ReportPaths {
  std::filesystem::path summary;
  std::filesystem::path nodes;
  std::filesystem::path efficiency_cdf;
  std::filesystem::path membership;
  std::filesystem::path manifest;
};

// Writes {run}_summary.csv, {run}_nodes.csv, {run}_efficiency_cdf.csv,
// {run}_membership.csv and {run}_manifest.txt under `dir`, creating it if
// needed. Throws std::runtime_error if a file cannot be written.
ReportPaths emit_report(const std::filesystem::path& dir, const RunMetadata& meta,
                        std::span<const NodeRecord> records, double n_bits,
                        double membership_step_s, double horizon_s);

// Row form of the summary CSV: (role, metric, value). Roles are the three
// populations plus "all".
struct SummaryRow {
  std::string role;
  std::string metric;
  double value = 0.0;
};
std::vector<SummaryRow> summary_rows(std::span<const NodeRecord> records, double n_bits);

const char* library_version();

}  // namespace swarmsim
