#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "swarmsim/metrics/metrics.hpp"
#include "swarmsim/scenario/config.hpp"
#include "swarmsim/scenario/population.hpp"

namespace swarmsim {

// A simulation reached a state that violates a model invariant (capacity,
// conservation, completion accounting). Carries a diagnostic.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunStats {
  std::uint64_t events = 0;      // dispatched, recomputes included
  std::uint64_t recomputes = 0;
  std::uint64_t transfer_events = 0;
  std::uint64_t messages = 0;    // protocol messages (handshake ... cancel)
  std::uint64_t blocks = 0;      // completed block transfers
  std::uint64_t bytes_up = 0;
  std::uint64_t bytes_down = 0;
  std::uint64_t duplicate_bytes = 0;
  std::uint64_t links = 0;       // connections opened
  std::size_t peak_edges = 0;
  double sim_end_s = 0.0;
  double wall_s = 0.0;           // not deterministic; kept out of reports
  std::size_t memory_estimate_bytes = 0;
};

struct RunResult {
  std::vector<NodeRecord> records;
  RunStats stats;
};

// One swarm, one torrent, one run. Construct, call run() once.
class Swarm {
 public:
  // Population, join times and history derived from the config.
  explicit Swarm(const ScenarioConfig& cfg);
  // Explicit population (ids must be 0..n-1 in order).
  Swarm(const ScenarioConfig& cfg, std::vector<NodeSpec> nodes);
  ~Swarm();
  Swarm(const Swarm&) = delete;
  Swarm& operator=(const Swarm&) = delete;

  // Throws InvariantViolation on a broken model invariant.
  RunResult run();

 private:
  class Impl;
  std::unique_ptr<Impl> impl_;
};

inline RunResult run_scenario(const ScenarioConfig& cfg) { return Swarm(cfg).run(); }

}  // namespace swarmsim
