#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "swarmsim/engine/rng.hpp"
#include "swarmsim/protocol/torrent.hpp"

namespace swarmsim {

// Picks a piece to start among untouched local pieces for which
// `offered(piece)` holds. A node with no complete piece picks uniformly at
// random; otherwise the rarest piece by `availability` wins, ties uniform.
template <typename Offered>
std::optional<std::uint32_t> select_piece_if(const PieceMap& local,
                                             std::span<const std::uint16_t> availability,
                                             Offered&& offered, Rng& rng) {
  const bool random_first = local.complete_count() == 0;
  std::optional<std::uint32_t> pick;
  std::uint32_t best = ~std::uint32_t{0};
  std::uint32_t ties = 0;
  for (std::uint32_t p = 0; p < local.piece_count(); ++p) {
    if (local.touched(p) || !offered(p)) continue;
    const std::uint32_t a = random_first ? 0u : availability[p];
    if (a < best) {
      best = a;
      ties = 1;
      pick = p;
    } else if (a == best) {
      // Reservoir sampling keeps each tied piece with probability 1/ties.
      ++ties;
      if (uniform_index(rng, ties) == 0) pick = p;
    }
  }
  return pick;
}

// Piece to start when requesting from one specific peer.
std::optional<std::uint32_t> select_piece(const PieceMap& local,
                                          std::span<const std::uint16_t> availability,
                                          const PieceMap& peer, Rng& rng);

struct NeighborPieces {
  const PieceMap* pieces = nullptr;
  bool unchokes_us = false;
};

// Neighborhood form: availability counts every neighbor, candidates are the
// pieces held by at least one unchoking neighbor.
std::optional<std::uint32_t> select_piece(const PieceMap& local,
                                          std::span<const NeighborPieces> neighborhood,
                                          Rng& rng);

}  // namespace swarmsim
