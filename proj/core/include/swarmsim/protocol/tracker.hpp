#pragma once

#include <cstdint>
#include <vector>

#include "swarmsim/engine/rng.hpp"

namespace swarmsim {

using NodeId = std::uint32_t;

enum class AnnounceKind : std::uint8_t { kJoin, kPeriodic, kDepart };

inline constexpr double kTrackerReannounceSeconds = 1800.0;

// Rendezvous point: hands out uniformly random subsets of the active peers.
class Tracker {
 public:
  // Returns min(request_size, active - 1) distinct active peers, excluding the
  // requester. kJoin registers the node first; kDepart removes it and returns
  // an empty list. Throws std::logic_error for announces from unregistered or
  // departed nodes.
  std::vector<NodeId> announce(NodeId node, AnnounceKind kind,
                               std::size_t request_size, Rng& rng);

  bool is_active(NodeId node) const;
  std::size_t active_count() const { return active_.size(); }

 private:
  std::vector<NodeId> active_;  // sorted, for deterministic sampling
  std::vector<NodeId> departed_;
};

}  // namespace swarmsim
