#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "swarmsim/protocol/tracker.hpp"
#include "swarmsim/scenario/config.hpp"

namespace swarmsim {

struct NodeRecord {
  NodeId id = 0;
  Role role = Role::kStandard;
  TradingKind trading = TradingKind::kTft;
  double k_bps = 0.0;  // download capacity
  double up_bps = 0.0;
  double t0_s = 0.0;
  std::optional<double> td_s;  // completion
  double seed_duration_s = 0.0;
  // When the node left; +inf if still present at the end of the run.
  double leave_s = std::numeric_limits<double>::infinity();
  std::uint64_t bytes_up = 0;
  std::uint64_t bytes_down = 0;  // includes duplicates
  std::uint64_t duplicate_bytes = 0;
  std::uint64_t seeded_bytes_given = 0;  // uploaded after completing
};

// e = (n_bits / (td - t0)) / k. Throws std::invalid_argument unless
// td > t0, k > 0 and n_bits > 0.
double efficiency(double n_bits, double t0_s, double td_s, double k_bps);
std::optional<double> efficiency(const NodeRecord& rec, double n_bits);

struct CdfPoint {
  double value = 0.0;
  double fraction = 0.0;
};

// Step CDF, one point per distinct value. Throws on empty input.
std::vector<CdfPoint> cdf(std::vector<double> values);

// Midpoint of the middle two for even counts. Throws on empty input.
double median(std::vector<double> values);

struct PopulationSummary {
  Role role = Role::kStandard;
  std::size_t nodes = 0;
  std::size_t completed = 0;
  double completion_fraction = 0.0;
  std::optional<double> median_efficiency;
  std::optional<double> median_download_s;
  std::optional<double> mean_efficiency;
  std::vector<CdfPoint> efficiency_cdf;
};

PopulationSummary population_summary(std::span<const NodeRecord> records, Role role,
                                     double n_bits);

struct Aggregate {
  std::size_t n = 0;
  double mean = 0.0;
  double stddev = 0.0;       // sample (n - 1)
  double ci95_normal = 0.0;  // 1.96 * stddev / sqrt(n)
  double ci95_sigma = 0.0;   // 1.96 * stddev
};

Aggregate aggregate(std::span<const double> values);

struct MembershipSample {
  double t_s = 0.0;
  std::size_t downloading = 0;
  std::size_t seeding = 0;
};

// Samples at 0, step, 2 step, ... up to horizon. Downloading covers
// [t0, td] (or [t0, leave) if never completed); seeding covers
// [td, min(td + seed_duration, leave)).
std::vector<MembershipSample> membership_timeseries(std::span<const NodeRecord> records,
                                                    double step_s, double horizon_s);

}  // namespace swarmsim
