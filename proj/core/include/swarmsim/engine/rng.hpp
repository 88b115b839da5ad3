#pragma once

#include <cstdint>
#include <random>

namespace swarmsim {

using Rng = std::mt19937_64;

// Subsystems that draw random numbers. Each (root seed, node, tag) triple gets
// its own generator, so adding a node never shifts another node's draws.
enum class StreamTag : std::uint64_t {
  kArrivals = 1,
  kRoles = 2,
  kBandwidth = 3,
  kSeedDuration = 4,
  kHistory = 5,
  kTracker = 6,
  kPeer = 7,  // per-node: piece ties, optimistic unchokes, lottery draws
  kIdentity = 8,
  kFixture = 9,
};

inline constexpr std::uint64_t kNoNode = ~std::uint64_t{0};

std::uint64_t mix_seed(std::uint64_t root, std::uint64_t node, StreamTag tag);

Rng make_stream(std::uint64_t root, std::uint64_t node, StreamTag tag);
inline Rng make_stream(std::uint64_t root, StreamTag tag) {
  return make_stream(root, kNoNode, tag);
}

// Uniform integer in [0, n). n must be positive.
std::size_t uniform_index(Rng& rng, std::size_t n);

// Uniform real in [0, 1).
double uniform01(Rng& rng);

}  // namespace swarmsim
