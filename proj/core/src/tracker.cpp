#include "swarmsim/protocol/tracker.hpp"

#include <algorithm>
#include <stdexcept>

namespace swarmsim {

bool Tracker::is_active(NodeId node) const {
  return std::binary_search(active_.begin(), active_.end(), node);
}

std::vector<NodeId> Tracker::announce(NodeId node, AnnounceKind kind,
                                      std::size_t request_size, Rng& rng) {
  if (std::binary_search(departed_.begin(), departed_.end(), node)) {
    throw std::logic_error("announce from a departed node");
  }
  auto it = std::lower_bound(active_.begin(), active_.end(), node);
  const bool registered = it != active_.end() && *it == node;

  switch (kind) {
    case AnnounceKind::kJoin:
      if (!registered) active_.insert(it, node);
      break;
    case AnnounceKind::kPeriodic:
      if (!registered) throw std::logic_error("announce from an unregistered node");
      break;
    case AnnounceKind::kDepart:
      if (!registered) throw std::logic_error("depart from an unregistered node");
      active_.erase(it);
      departed_.insert(std::lower_bound(departed_.begin(), departed_.end(), node), node);
      return {};
  }

  std::vector<NodeId> pool;
  pool.reserve(active_.size());
  for (NodeId id : active_) {
    if (id != node) pool.push_back(id);
  }
  const std::size_t take = std::min(request_size, pool.size());
  // Partial Fisher-Yates: the first `take` entries become the sample.
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + uniform_index(rng, pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(take);
  return pool;
}

}  // namespace swarmsim
