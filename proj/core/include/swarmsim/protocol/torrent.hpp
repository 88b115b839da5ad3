#pragma once

#include <cstdint>
#include <vector>

namespace swarmsim {

inline constexpr std::uint32_t kKiB = 1024;
inline constexpr std::uint64_t kMiB = 1024ull * 1024ull;
inline constexpr std::uint64_t kGiB = 1024ull * kMiB;

struct TorrentSpec {
  std::uint64_t total_bytes = 64 * kMiB;
  std::uint32_t piece_bytes = 256 * kKiB;
  std::uint32_t block_bytes = 16 * kKiB;

  // Throws std::invalid_argument on zero sizes or a piece size that is not a
  // multiple of the block size.
  void validate() const;

  std::uint32_t piece_count() const;
  std::uint32_t blocks_per_piece() const { return piece_bytes / block_bytes; }
  std::uint32_t piece_size(std::uint32_t piece) const;
  std::uint32_t blocks_in_piece(std::uint32_t piece) const;
  std::uint32_t block_size(std::uint32_t piece, std::uint32_t block) const;
  std::uint64_t total_blocks() const;
  double total_bits() const { return static_cast<double>(total_bytes) * 8.0; }

  bool operator==(const TorrentSpec&) const = default;
};

enum class PieceStatus : std::uint8_t { kMissing, kPartial, kComplete };

// Piece and block bookkeeping for one node. A block is either received or
// carries the number of outstanding requests for it (more than one only in
// endgame mode). "Touched" pieces have at least one block requested or
// received and are kept in the in-progress list until complete.
class PieceMap {
 public:
  explicit PieceMap(const TorrentSpec& spec);
  static PieceMap full(const TorrentSpec& spec);

  const TorrentSpec& spec() const { return spec_; }
  std::uint32_t piece_count() const { return static_cast<std::uint32_t>(received_.size()); }

  bool has(std::uint32_t piece) const { return received_[piece] == blocks_in(piece); }
  PieceStatus status(std::uint32_t piece) const;
  bool touched(std::uint32_t piece) const { return touched_[piece] != 0; }
  std::uint32_t complete_count() const { return complete_; }
  bool is_complete() const { return complete_ == piece_count(); }

  bool block_received(std::uint32_t piece, std::uint32_t block) const {
    return block_state_[index(piece, block)] == kReceived;
  }
  std::uint32_t outstanding(std::uint32_t piece, std::uint32_t block) const;

  // Blocks of incomplete pieces that are neither received nor requested.
  std::uint64_t unrequested_blocks() const { return unrequested_; }
  std::uint32_t unrequested_blocks(std::uint32_t piece) const { return open_[piece]; }

  // Incomplete pieces with at least one requested or received block, in the
  // order they were started.
  const std::vector<std::uint32_t>& in_progress() const { return in_progress_; }

  void mark_requested(std::uint32_t piece, std::uint32_t block);
  void unmark_requested(std::uint32_t piece, std::uint32_t block);

  // Marks the block received and clears its outstanding count. Returns true
  // when this completes the piece. Receiving a block twice is a no-op that
  // returns false.
  bool receive(std::uint32_t piece, std::uint32_t block);

 private:
  static constexpr std::uint8_t kReceived = 0xff;

  std::size_t index(std::uint32_t piece, std::uint32_t block) const {
    return static_cast<std::size_t>(piece) * stride_ + block;
  }
  std::uint32_t blocks_in(std::uint32_t piece) const {
    return piece + 1 == piece_count() ? last_blocks_ : stride_;
  }
  void touch(std::uint32_t piece);

  TorrentSpec spec_;
  std::uint32_t stride_;
  std::uint32_t last_blocks_;
  std::vector<std::uint8_t> block_state_;
  std::vector<std::uint16_t> received_;
  std::vector<std::uint16_t> open_;  // per piece: neither received nor requested
  std::vector<std::uint8_t> touched_;
  std::vector<std::uint32_t> in_progress_;
  std::uint32_t complete_ = 0;
  std::uint64_t unrequested_ = 0;
};

}  // namespace swarmsim
