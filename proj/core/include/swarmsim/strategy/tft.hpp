#pragma once

#include <span>
#include <vector>

#include "swarmsim/protocol/choking.hpp"

namespace swarmsim {

// Standard tit-for-tat: the `slots` interested neighbors with the best
// trailing-window rate to us. Edges are left uncapped.
inline std::vector<NodeId> tft_select(std::span<const RateCandidate> interested,
                                      std::size_t slots) {
  return top_by_rate({interested.begin(), interested.end()}, slots);
}

}  // namespace swarmsim
