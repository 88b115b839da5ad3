#include "swarmsim/protocol/torrent.hpp"

#include <algorithm>
#include <stdexcept>

namespace swarmsim {

void TorrentSpec::validate() const {
  if (total_bytes == 0 || piece_bytes == 0 || block_bytes == 0) {
    throw std::invalid_argument("torrent sizes must be positive");
  }
  if (piece_bytes % block_bytes != 0) {
    throw std::invalid_argument("piece size must be a multiple of block size");
  }
  if (piece_bytes / block_bytes > 254) {
    throw std::invalid_argument("at most 254 blocks per piece are supported");
  }
}

std::uint32_t TorrentSpec::piece_count() const {
  return static_cast<std::uint32_t>((total_bytes + piece_bytes - 1) / piece_bytes);
}

std::uint32_t TorrentSpec::piece_size(std::uint32_t piece) const {
  const std::uint64_t start = static_cast<std::uint64_t>(piece) * piece_bytes;
  return static_cast<std::uint32_t>(std::min<std::uint64_t>(piece_bytes, total_bytes - start));
}

std::uint32_t TorrentSpec::blocks_in_piece(std::uint32_t piece) const {
  return (piece_size(piece) + block_bytes - 1) / block_bytes;
}

std::uint32_t TorrentSpec::block_size(std::uint32_t piece, std::uint32_t block) const {
  const std::uint32_t size = piece_size(piece);
  const std::uint32_t start = block * block_bytes;
  return std::min(block_bytes, size - start);
}

std::uint64_t TorrentSpec::total_blocks() const {
  const std::uint32_t n = piece_count();
  return static_cast<std::uint64_t>(n - 1) * blocks_per_piece() + blocks_in_piece(n - 1);
}

PieceMap::PieceMap(const TorrentSpec& spec)
    : spec_(spec),
      stride_(spec.blocks_per_piece()),
      last_blocks_(spec.blocks_in_piece(spec.piece_count() - 1)),
      block_state_(static_cast<std::size_t>(spec.piece_count()) * spec.blocks_per_piece(), 0),
      received_(spec.piece_count(), 0),
      open_(spec.piece_count(), 0),
      touched_(spec.piece_count(), 0),
      unrequested_(spec.total_blocks()) {
  spec_.validate();
  for (std::uint32_t p = 0; p < piece_count(); ++p) {
    open_[p] = static_cast<std::uint16_t>(blocks_in(p));
  }
}

PieceMap PieceMap::full(const TorrentSpec& spec) {
  PieceMap map(spec);
  for (std::uint32_t p = 0; p < map.piece_count(); ++p) {
    for (std::uint32_t b = 0; b < map.blocks_in(p); ++b) {
      map.block_state_[map.index(p, b)] = kReceived;
    }
    map.received_[p] = static_cast<std::uint16_t>(map.blocks_in(p));
    map.open_[p] = 0;
    map.touched_[p] = 1;
  }
  map.complete_ = map.piece_count();
  map.unrequested_ = 0;
  return map;
}

PieceStatus PieceMap::status(std::uint32_t piece) const {
  if (has(piece)) return PieceStatus::kComplete;
  return received_[piece] > 0 ? PieceStatus::kPartial : PieceStatus::kMissing;
}

std::uint32_t PieceMap::outstanding(std::uint32_t piece, std::uint32_t block) const {
  const auto s = block_state_[index(piece, block)];
  return s == kReceived ? 0 : s;
}

void PieceMap::touch(std::uint32_t piece) {
  if (!touched_[piece]) {
    touched_[piece] = 1;
    in_progress_.push_back(piece);
  }
}

void PieceMap::mark_requested(std::uint32_t piece, std::uint32_t block) {
  auto& s = block_state_[index(piece, block)];
  if (s == kReceived) {
    throw std::logic_error("requesting a block that is already held");
  }
  if (s == 0) {
    --unrequested_;
    --open_[piece];
  }
  if (s < kReceived - 1) ++s;
  touch(piece);
}

void PieceMap::unmark_requested(std::uint32_t piece, std::uint32_t block) {
  auto& s = block_state_[index(piece, block)];
  if (s == kReceived || s == 0) return;
  --s;
  if (s == 0) {
    ++unrequested_;
    ++open_[piece];
  }
}

bool PieceMap::receive(std::uint32_t piece, std::uint32_t block) {
  auto& s = block_state_[index(piece, block)];
  if (s == kReceived) return false;
  if (s == 0) {
    --unrequested_;
    --open_[piece];
  }
  s = kReceived;
  touch(piece);
  ++received_[piece];
  if (received_[piece] == blocks_in(piece)) {
    ++complete_;
    in_progress_.erase(std::find(in_progress_.begin(), in_progress_.end(), piece));
    return true;
  }
  return false;
}

}  // namespace swarmsim
