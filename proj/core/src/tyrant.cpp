#include "swarmsim/strategy/tyrant.hpp"

#include <algorithm>

#include "swarmsim/engine/flow_allocator.hpp"

namespace swarmsim {

TyrantEstimate tyrant_initial(double capacity_bps, std::size_t active_set,
                              const TyrantParams& params) {
  TyrantEstimate est;
  const double slots = static_cast<double>(std::max<std::size_t>(active_set, 1));
  est.up_bps = std::max(capacity_bps / slots, params.min_rate_bps);
  est.down_bps = 0.0;
  return est;
}

void tyrant_update(TyrantEstimate& est, bool reciprocated, double observed_down_bps,
                   double fallback_down_bps, double capacity_bps,
                   const TyrantParams& params) {
  if (reciprocated != est.last_reciprocated) est.streak = 0;
  est.last_reciprocated = reciprocated;
  if (reciprocated) {
    if (++est.streak >= params.streak) {
      est.up_bps *= params.gamma;
      est.streak = 0;
    }
  } else {
    est.up_bps = std::min(est.up_bps * params.delta, capacity_bps);
    est.streak = 0;
  }
  est.up_bps = std::max(est.up_bps, params.min_rate_bps);
  est.down_bps = observed_down_bps > 0.0 ? observed_down_bps : fallback_down_bps;
}

std::vector<CappedUnchoke> tyrant_select(std::vector<TyrantCandidate> candidates,
                                         double budget_bps) {
  std::sort(candidates.begin(), candidates.end(),
            [](const TyrantCandidate& a, const TyrantCandidate& b) {
              // Cross-multiplied to avoid dividing; u is always positive.
              const double lhs = a.down_bps * b.up_bps;
              const double rhs = b.down_bps * a.up_bps;
              if (lhs != rhs) return lhs > rhs;
              return a.peer < b.peer;
            });
  std::vector<CappedUnchoke> out;
  double used = 0.0;
  for (const auto& c : candidates) {
    if (used + c.up_bps > budget_bps) break;
    used += c.up_bps;
    out.push_back({c.peer, c.up_bps});
  }
  return out;
}

TyrantPairTrace simulate_tyrant_pair(double up_a_bps, double down_a_bps, double up_b_bps,
                                     double down_b_bps, std::size_t active_set, int rounds,
                                     const TyrantParams& params) {
  TyrantPairTrace trace;
  const ClientTag tag = advertised_tag(true, params.self_identify);
  trace.block_mode = tyrant_handshake(tag, params.self_identify);

  const NodeCapacity nodes[2] = {{up_a_bps, down_a_bps}, {up_b_bps, down_b_bps}};
  TyrantEstimate a = tyrant_initial(up_a_bps, active_set, params);
  TyrantEstimate b = tyrant_initial(up_b_bps, active_set, params);
  FlowAllocator allocator;

  for (int round = 0; round < rounds; ++round) {
    std::vector<FlowEdge> edges;
    if (trace.block_mode) {
      edges = {{0, 1}, {1, 0}};
    } else {
      const auto sel_a = tyrant_select({{1, a.down_bps, a.up_bps}}, up_a_bps);
      const auto sel_b = tyrant_select({{0, b.down_bps, b.up_bps}}, up_b_bps);
      if (!sel_a.empty()) edges.push_back({0, 1, sel_a.front().cap_bps});
      if (!sel_b.empty()) edges.push_back({1, 0, sel_b.front().cap_bps});
    }
    const FlowAllocation& alloc = allocator.allocate(edges, nodes);
    const double ab = alloc.rate(0, 1);
    const double ba = alloc.rate(1, 0);
    trace.a_to_b_bps.push_back(ab);
    trace.b_to_a_bps.push_back(ba);
    if (!trace.block_mode) {
      tyrant_update(a, ba > 0.0, ba, 0.0, up_a_bps, params);
      tyrant_update(b, ab > 0.0, ab, 0.0, up_b_bps, params);
    }
    trace.a_offer_bps.push_back(trace.block_mode ? ab : a.up_bps);
    trace.b_offer_bps.push_back(trace.block_mode ? ba : b.up_bps);
  }
  return trace;
}

}  // namespace swarmsim
