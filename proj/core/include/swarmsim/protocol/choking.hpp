#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "swarmsim/engine/rng.hpp"
#include "swarmsim/protocol/tracker.hpp"

namespace swarmsim {

struct RateCandidate {
  NodeId peer = 0;
  double rate_bps = 0.0;  // trailing-window download rate from this peer
};

struct ActiveSet {
  std::vector<NodeId> regular;
  std::optional<NodeId> optimistic;

  bool contains(NodeId peer) const;
  std::size_t size() const { return regular.size() + (optimistic ? 1 : 0); }
};

struct ChokeParams {
  std::size_t active_set_size = 4;
  std::size_t optimistic_slots = 1;
  // Off by default: slots = max(active_set_size, floor(sqrt(up_kbps / 64))).
  bool scale_with_upload = false;
};

std::size_t active_set_size(const ChokeParams& params, double up_bps);

// Highest rates first; equal rates go to the lower node id.
std::vector<NodeId> top_by_rate(std::vector<RateCandidate> candidates, std::size_t slots);

// Regular slots become the top interested peers. The optimistic peer keeps its
// slot while still interested and not promoted into the regular set.
ActiveSet choke_round(std::span<const RateCandidate> interested,
                      const ActiveSet& previous, std::size_t regular_slots);

// Uniform pick among interested peers we currently choke.
std::optional<NodeId> optimistic_round(std::span<const NodeId> choked_interested, Rng& rng);

}  // namespace swarmsim
