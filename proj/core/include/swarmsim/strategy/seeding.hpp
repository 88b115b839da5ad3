#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "swarmsim/engine/rng.hpp"
#include "swarmsim/identity/identity.hpp"
#include "swarmsim/protocol/tracker.hpp"

namespace swarmsim {

// Remembers where the last rotation stopped. Keyed by node id rather than
// list position so departures do not stall or skip the rotation.
struct RoundRobinCursor {
  std::optional<NodeId> last;
};

// The next `slots` peers after the cursor in cyclic id order. `interested`
// must be sorted ascending.
std::vector<NodeId> seed_round_robin(std::span<const NodeId> interested, std::size_t slots,
                                     RoundRobinCursor& cursor);

struct TicketParams {
  double normalization_bytes = 1048576.0;
};

std::uint32_t tickets_for(std::uint64_t seeded_bytes, const TicketParams& params = {});

class TicketTable {
 public:
  void set(LongTermId id, std::uint32_t tickets) { tickets_[id] = tickets; }
  // Unknown and unidentified peers hold the baseline single ticket.
  std::uint32_t tickets(std::optional<LongTermId> id) const;
  // Only identities with ledgered bytes may win reserved slots.
  bool qualified(std::optional<LongTermId> id) const;
  std::size_t size() const { return tickets_.size(); }

 private:
  std::map<LongTermId, std::uint32_t> tickets_;
};

TicketTable reward_tickets(const SeedingLedger& ledger, const TicketParams& params = {});

struct SeedCandidate {
  NodeId peer = 0;
  std::optional<LongTermId> identity;
  bool tyrant = false;  // as recognized at handshake
};

std::vector<SeedCandidate> ignore_tyrants_filter(std::span<const SeedCandidate> interested);

struct SlotAssignment {
  std::size_t total_slots = 0;
  std::size_t reserved_slots = 0;  // round(rho * S), fixed per run
  std::vector<NodeId> reserved;    // lottery winners, at most reserved_slots
  std::vector<NodeId> open;        // round-robin picks, at most S - R

  std::size_t open_slots() const { return total_slots - reserved_slots; }
  // Upload fractions available to each group. Unfilled reserved slots idle.
  double reserved_share() const;
  double open_share() const;
};

std::size_t reserved_slot_count(std::size_t slots, double reservation);

// Up to `count` distinct qualified candidates, drawn without replacement with
// probability proportional to tickets. Returned in draw order.
std::vector<NodeId> lottery_draw(const TicketTable& tickets,
                                 std::span<const SeedCandidate> candidates, std::size_t count,
                                 Rng& rng);

// `interested` must be sorted by peer id. Reserved slots are drawn without
// replacement, weighted by tickets, among qualified peers; open slots rotate
// over everyone not already holding a reserved slot.
SlotAssignment reward_slot_assignment(const TicketTable& tickets,
                                      std::span<const SeedCandidate> interested,
                                      std::size_t slots, double reservation,
                                      RoundRobinCursor& cursor, Rng& rng);

}  // namespace swarmsim
