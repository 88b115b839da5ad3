#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "swarmsim/identity/identity.hpp"
#include "swarmsim/protocol/tracker.hpp"
#include "swarmsim/scenario/config.hpp"

namespace swarmsim {

struct BandwidthProfile {
  double down_bps = 0.0;
  double up_bps = 0.0;
};

struct NodeSpec {
  NodeId id = 0;
  Role role = Role::kStandard;
  BandwidthProfile bandwidth;
  double join_s = 0.0;
  double seed_duration_s = 0.0;  // already compressed; +inf for permanent seeds
  std::optional<LongTermId> identity;
};

// Largest-remainder rounding; remainder ties go to the earlier population.
std::array<std::size_t, kPopulationCount> role_counts(
    std::size_t n, const std::array<double, kPopulationCount>& fractions);

// Initial seeds get ids [0, initial_seeds), join at 0 and never leave.
// Downloaders follow in join order; roles are a seeded shuffle of the exact
// per-role counts, each role gets an even shuffled share of the bandwidth
// classes, and seeding times are drawn per node.
std::vector<NodeSpec> build_population(const ScenarioConfig& cfg,
                                       std::span<const double> join_times);

// Join times for the configured trace or synthetic flash crowd, compressed.
std::vector<double> scenario_join_times(const ScenarioConfig& cfg);

}  // namespace swarmsim
