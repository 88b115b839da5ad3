#include "swarmsim/protocol/piece_selection.hpp"

#include <vector>

namespace swarmsim {

std::optional<std::uint32_t> select_piece(const PieceMap& local,
                                          std::span<const std::uint16_t> availability,
                                          const PieceMap& peer, Rng& rng) {
  return select_piece_if(
      local, availability, [&](std::uint32_t p) { return peer.has(p); }, rng);
}

std::optional<std::uint32_t> select_piece(const PieceMap& local,
                                          std::span<const NeighborPieces> neighborhood,
                                          Rng& rng) {
  std::vector<std::uint16_t> availability(local.piece_count(), 0);
  std::vector<bool> offered(local.piece_count(), false);
  for (const auto& n : neighborhood) {
    for (std::uint32_t p = 0; p < local.piece_count(); ++p) {
      if (!n.pieces->has(p)) continue;
      ++availability[p];
      if (n.unchokes_us) offered[p] = true;
    }
  }
  return select_piece_if(
      local, availability, [&](std::uint32_t p) { return offered[p]; }, rng);
}

}  // namespace swarmsim
