#include "swarmsim/identity/identity.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace swarmsim {

void SeedingLedger::add(LongTermId peer, std::uint64_t bytes) {
  if (bytes == 0) return;
  seeded_[peer] += bytes;
}

std::uint64_t SeedingLedger::bytes(LongTermId peer) const {
  auto it = seeded_.find(peer);
  return it == seeded_.end() ? 0 : it->second;
}

std::uint64_t SeedingLedger::total() const {
  std::uint64_t sum = 0;
  for (const auto& [id, b] : seeded_) sum += b;
  return sum;
}

void SeedingLedger::write(std::ostream& out) const {
  out << "# identity seeded_bytes\n";
  for (const auto& [id, b] : seeded_) out << id.value << ' ' << b << '\n';
}

SeedingLedger SeedingLedger::read(std::istream& in) {
  SeedingLedger ledger;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::uint64_t id = 0;
    std::uint64_t bytes = 0;
    std::string extra;
    if (!(fields >> id >> bytes) || (fields >> extra)) {
      throw std::runtime_error("ledger line " + std::to_string(line_no) +
                               ": expected '<identity> <bytes>'");
    }
    ledger.add(LongTermId{id}, bytes);
  }
  return ledger;
}

void observe_transfer(SeedingLedger& ledger, std::optional<LongTermId> peer,
                      std::uint64_t received, std::uint64_t sent_in_window) {
  if (!peer || sent_in_window != 0) return;
  ledger.add(*peer, received);
}

bool known_seeder(const SeedingLedger& ledger, std::optional<LongTermId> peer) {
  return peer && ledger.bytes(*peer) > 0;
}

std::size_t OverlapAssignment::rewarding_count() const {
  return static_cast<std::size_t>(std::count(rewarding.begin(), rewarding.end(), true));
}

SyntheticHistory synth_history(std::span<const LongTermId> altruists, double overlap,
                               Rng& rng, const HistoryParams& params) {
  if (overlap < 0.0 || overlap > 1.0) {
    throw std::invalid_argument("overlap must lie in [0, 1]");
  }
  const std::size_t n = altruists.size();
  SyntheticHistory out;
  out.ledgers.resize(n);
  out.assignment.overlap = overlap;
  out.assignment.rewarding.assign(n, false);

  const auto k = static_cast<std::size_t>(std::llround(overlap * static_cast<double>(n)));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    std::swap(order[i], order[i + uniform_index(rng, n - i)]);
  }
  for (std::size_t i = 0; i < k; ++i) out.assignment.rewarding[order[i]] = true;

  const double lo = std::log(static_cast<double>(params.min_bytes));
  const double hi = std::log(static_cast<double>(params.max_bytes));
  for (std::size_t i = 0; i < n; ++i) {
    if (!out.assignment.rewarding[i]) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double b = std::exp(lo + (hi - lo) * uniform01(rng));
      const auto bytes = std::clamp(static_cast<std::uint64_t>(std::llround(b)),
                                    params.min_bytes, params.max_bytes);
      out.ledgers[i].add(altruists[j], bytes);
    }
  }
  return out;
}

}  // namespace swarmsim
