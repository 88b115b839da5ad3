#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "swarmsim/engine/rng.hpp"
#include "swarmsim/protocol/torrent.hpp"

namespace swarmsim {

// Opaque long-term client identifier exchanged at handshake. Legacy clients
// have none and are treated as having no history.
struct LongTermId {
  std::uint64_t value = 0;
  auto operator<=>(const LongTermId&) const = default;
};

// Bytes received from each identity while giving that identity nothing back
// ("seeded bytes"). Only first-hand observations and synthetic history enter.
class SeedingLedger {
 public:
  void add(LongTermId peer, std::uint64_t bytes);
  std::uint64_t bytes(LongTermId peer) const;
  std::size_t size() const { return seeded_.size(); }
  bool empty() const { return seeded_.empty(); }
  std::uint64_t total() const;
  const std::map<LongTermId, std::uint64_t>& entries() const { return seeded_; }

  // Line-oriented table: "<identity> <bytes>" per line, '#' comments allowed.
  void write(std::ostream& out) const;
  // Throws std::runtime_error with the offending line number.
  static SeedingLedger read(std::istream& in);

  bool operator==(const SeedingLedger&) const = default;

 private:
  std::map<LongTermId, std::uint64_t> seeded_;
};

// Accrues `received` to `peer` only when nothing was sent back to it during
// the accounting window. Unidentified peers are ignored.
void observe_transfer(SeedingLedger& ledger, std::optional<LongTermId> peer,
                      std::uint64_t received, std::uint64_t sent_in_window);

bool known_seeder(const SeedingLedger& ledger, std::optional<LongTermId> peer);

struct OverlapAssignment {
  double overlap = 0.0;
  std::vector<bool> rewarding;  // aligned with the altruist list
  std::size_t rewarding_count() const;
};

struct SyntheticHistory {
  std::vector<SeedingLedger> ledgers;  // aligned with the altruist list
  OverlapAssignment assignment;
};

struct HistoryParams {
  std::uint64_t min_bytes = kMiB;
  std::uint64_t max_bytes = 10 * kGiB;
};

// round(overlap * n) altruists become rewarding; each rewarding ledger lists
// every other altruist with a log-uniform byte count in [min, max].
// Non-rewarding altruists get empty ledgers.
SyntheticHistory synth_history(std::span<const LongTermId> altruists, double overlap,
                               Rng& rng, const HistoryParams& params = {});

}  // namespace swarmsim
