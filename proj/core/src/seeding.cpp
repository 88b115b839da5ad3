#include "swarmsim/strategy/seeding.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace swarmsim {

std::vector<NodeId> seed_round_robin(std::span<const NodeId> interested, std::size_t slots,
                                     RoundRobinCursor& cursor) {
  std::vector<NodeId> out;
  if (interested.empty() || slots == 0) return out;
  const std::size_t take = std::min(slots, interested.size());
  std::size_t start = 0;
  if (cursor.last) {
    start = static_cast<std::size_t>(
        std::upper_bound(interested.begin(), interested.end(), *cursor.last) -
        interested.begin());
  }
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    out.push_back(interested[(start + i) % interested.size()]);
  }
  cursor.last = out.back();
  return out;
}

std::uint32_t tickets_for(std::uint64_t seeded_bytes, const TicketParams& params) {
  if (seeded_bytes == 0) return 1;
  const double x = 1.0 + static_cast<double>(seeded_bytes) / params.normalization_bytes;
  // Exact powers of two must not fall a step short through rounding.
  auto extra = static_cast<std::uint32_t>(std::floor(std::log2(x)));
  while (std::ldexp(1.0, static_cast<int>(extra) + 1) <= x) ++extra;
  while (extra > 0 && std::ldexp(1.0, static_cast<int>(extra)) > x) --extra;
  return 1 + extra;
}

std::uint32_t TicketTable::tickets(std::optional<LongTermId> id) const {
  if (!id) return 1;
  auto it = tickets_.find(*id);
  return it == tickets_.end() ? 1 : it->second;
}

bool TicketTable::qualified(std::optional<LongTermId> id) const {
  return id && tickets_.count(*id) != 0;
}

TicketTable reward_tickets(const SeedingLedger& ledger, const TicketParams& params) {
  TicketTable table;
  for (const auto& [id, bytes] : ledger.entries()) {
    if (bytes > 0) table.set(id, tickets_for(bytes, params));
  }
  return table;
}

std::vector<SeedCandidate> ignore_tyrants_filter(std::span<const SeedCandidate> interested) {
  std::vector<SeedCandidate> out;
  out.reserve(interested.size());
  for (const auto& c : interested) {
    if (!c.tyrant) out.push_back(c);
  }
  return out;
}

double SlotAssignment::reserved_share() const {
  if (total_slots == 0) return 0.0;
  return static_cast<double>(reserved.size()) / static_cast<double>(total_slots);
}

double SlotAssignment::open_share() const {
  if (total_slots == 0) return 0.0;
  return static_cast<double>(open_slots()) / static_cast<double>(total_slots);
}

std::size_t reserved_slot_count(std::size_t slots, double reservation) {
  if (reservation < 0.0 || reservation > 1.0) {
    throw std::invalid_argument("reservation must lie in [0, 1]");
  }
  return static_cast<std::size_t>(std::llround(reservation * static_cast<double>(slots)));
}

std::vector<NodeId> lottery_draw(const TicketTable& tickets,
                                 std::span<const SeedCandidate> candidates, std::size_t count,
                                 Rng& rng) {
  std::vector<NodeId> pool;
  std::vector<std::uint64_t> weight;
  for (const auto& c : candidates) {
    if (!tickets.qualified(c.identity)) continue;
    pool.push_back(c.peer);
    weight.push_back(tickets.tickets(c.identity));
  }
  std::uint64_t total = 0;
  for (auto w : weight) total += w;

  std::vector<NodeId> winners;
  while (winners.size() < count && !pool.empty()) {
    std::uint64_t ticket = uniform_index(rng, static_cast<std::size_t>(total));
    std::size_t pick = 0;
    while (ticket >= weight[pick]) ticket -= weight[pick++];
    winners.push_back(pool[pick]);
    total -= weight[pick];
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
    weight.erase(weight.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return winners;
}

SlotAssignment reward_slot_assignment(const TicketTable& tickets,
                                      std::span<const SeedCandidate> interested,
                                      std::size_t slots, double reservation,
                                      RoundRobinCursor& cursor, Rng& rng) {
  SlotAssignment out;
  out.total_slots = slots;
  out.reserved_slots = reserved_slot_count(slots, reservation);
  out.reserved = lottery_draw(tickets, interested, out.reserved_slots, rng);
  std::sort(out.reserved.begin(), out.reserved.end());

  std::vector<NodeId> rest;
  rest.reserve(interested.size());
  for (const auto& c : interested) {
    if (!std::binary_search(out.reserved.begin(), out.reserved.end(), c.peer)) {
      rest.push_back(c.peer);
    }
  }
  out.open = seed_round_robin(rest, out.open_slots(), cursor);
  return out;
}

}  // namespace swarmsim
