#include "swarmsim/protocol/choking.hpp"

#include <algorithm>
#include <cmath>

namespace swarmsim {

bool ActiveSet::contains(NodeId peer) const {
  if (optimistic && *optimistic == peer) return true;
  return std::find(regular.begin(), regular.end(), peer) != regular.end();
}

std::size_t active_set_size(const ChokeParams& params, double up_bps) {
  if (!params.scale_with_upload) return params.active_set_size;
  const auto scaled = static_cast<std::size_t>(std::floor(std::sqrt(up_bps / 1000.0 / 64.0)));
  return std::max(params.active_set_size, scaled);
}

std::vector<NodeId> top_by_rate(std::vector<RateCandidate> candidates, std::size_t slots) {
  auto better = [](const RateCandidate& a, const RateCandidate& b) {
    if (a.rate_bps != b.rate_bps) return a.rate_bps > b.rate_bps;
    return a.peer < b.peer;
  };
  const std::size_t take = std::min(slots, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take),
                    candidates.end(), better);
  std::vector<NodeId> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back(candidates[i].peer);
  return out;
}

ActiveSet choke_round(std::span<const RateCandidate> interested,
                      const ActiveSet& previous, std::size_t regular_slots) {
  ActiveSet next;
  next.regular = top_by_rate({interested.begin(), interested.end()}, regular_slots);
  if (previous.optimistic) {
    const NodeId opt = *previous.optimistic;
    const bool still_interested =
        std::any_of(interested.begin(), interested.end(),
                    [&](const RateCandidate& c) { return c.peer == opt; });
    const bool promoted =
        std::find(next.regular.begin(), next.regular.end(), opt) != next.regular.end();
    if (still_interested && !promoted) next.optimistic = opt;
  }
  return next;
}

std::optional<NodeId> optimistic_round(std::span<const NodeId> choked_interested, Rng& rng) {
  if (choked_interested.empty()) return std::nullopt;
  return choked_interested[uniform_index(rng, choked_interested.size())];
}

}  // namespace swarmsim
