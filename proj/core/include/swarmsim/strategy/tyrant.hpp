#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "swarmsim/protocol/tracker.hpp"

namespace swarmsim {

struct TyrantParams {
  double gamma = 0.9;   // decay after `streak` reciprocated rounds
  double delta = 1.2;   // growth after an unreciprocated round
  int streak = 3;
  bool self_identify = true;
  double min_rate_bps = 1000.0;
};

// Per-peer state kept by a tyrant.
struct TyrantEstimate {
  double up_bps = 0.0;    // u_p: what we offer the peer
  double down_bps = 0.0;  // d_p: what we expect back
  int streak = 0;
  bool last_reciprocated = false;
};

TyrantEstimate tyrant_initial(double capacity_bps, std::size_t active_set,
                              const TyrantParams& params);

// One round of evaluation. `fallback_down_bps` stands in for d_p when nothing
// was observed (typically derived from the peer's piece-announce rate).
void tyrant_update(TyrantEstimate& est, bool reciprocated, double observed_down_bps,
                   double fallback_down_bps, double capacity_bps,
                   const TyrantParams& params);

struct TyrantCandidate {
  NodeId peer = 0;
  double down_bps = 0.0;
  double up_bps = 0.0;
};

struct CappedUnchoke {
  NodeId peer = 0;
  double cap_bps = 0.0;
};

// Sort by d/u descending (ties: lower id) and admit while the running sum of
// u stays within `budget_bps`. Admission stops at the first peer that does
// not fit.
std::vector<CappedUnchoke> tyrant_select(std::vector<TyrantCandidate> candidates,
                                         double budget_bps);

enum class ClientTag { kStandard, kTyrant };

// What a node advertises in its peer id.
inline ClientTag advertised_tag(bool is_tyrant, bool self_identify) {
  return is_tyrant && self_identify ? ClientTag::kTyrant : ClientTag::kStandard;
}

// True when the local side recognizes the peer as a tyrant.
inline bool tyrant_handshake(ClientTag peer_tag, bool local_self_identify) {
  return peer_tag == ClientTag::kTyrant && local_self_identify;
}

// Two tyrants connected only to each other, each running its estimates
// against the other for `rounds` choke rounds through the flow allocator.
struct TyrantPairTrace {
  std::vector<double> a_to_b_bps;  // allocated rate per round
  std::vector<double> b_to_a_bps;
  std::vector<double> a_offer_bps;  // u_p held by a for b after each round
  std::vector<double> b_offer_bps;
  bool block_mode = false;
};

TyrantPairTrace simulate_tyrant_pair(double up_a_bps, double down_a_bps, double up_b_bps,
                                     double down_b_bps, std::size_t active_set, int rounds,
                                     const TyrantParams& params);

}  // namespace swarmsim
