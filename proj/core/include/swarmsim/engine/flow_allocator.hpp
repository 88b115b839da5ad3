#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace swarmsim {

inline constexpr double kUncapped = std::numeric_limits<double>::infinity();

struct NodeCapacity {
  double up_bps = 0.0;
  double down_bps = 0.0;
};

// One active upload edge. `cap_bps` bounds this edge alone; `pool`, when
// non-negative, indexes a shared capacity that bounds the sum of all edges
// tagged with it (used for the reserved and open shares of a reward seed).
struct FlowEdge {
  std::uint32_t uploader = 0;
  std::uint32_t downloader = 0;
  double cap_bps = kUncapped;
  std::int32_t pool = -1;
};

struct FlowAllocation {
  std::vector<FlowEdge> edges;
  std::vector<double> rates;          // bits/s, aligned with `edges`
  std::vector<double> residual_up;    // per node
  std::vector<double> residual_down;  // per node

  // Rate of the first edge uploader -> downloader, 0 if absent.
  double rate(std::uint32_t uploader, std::uint32_t downloader) const;
};

// Max-min fair allocation by progressive filling: every unfrozen edge rises
// at the same rate; when a constraint (node upload, node download, pool or
// edge cap) saturates, its edges freeze at the current level.
//
// The allocator keeps its scratch buffers between calls; one instance per
// simulation avoids reallocating on every recompute.
class FlowAllocator {
 public:
  const FlowAllocation& allocate(std::span<const FlowEdge> edges,
                                 std::span<const NodeCapacity> nodes,
                                 std::span<const double> pool_caps = {});

 private:
  struct HeapEntry {
    double level;
    std::uint32_t constraint;
    std::uint32_t version;
  };

  FlowAllocation result_;
  std::vector<double> cap_;
  std::vector<double> frozen_sum_;
  std::vector<std::uint32_t> active_;
  std::vector<std::uint32_t> version_;
  std::vector<std::uint32_t> member_offset_;
  std::vector<std::uint32_t> members_;
  std::vector<std::uint32_t> edge_constraints_;  // 4 slots per edge
  std::vector<std::uint8_t> edge_frozen_;
  std::vector<HeapEntry> heap_;
};

FlowAllocation allocate_flows(std::span<const FlowEdge> edges,
                              std::span<const NodeCapacity> nodes,
                              std::span<const double> pool_caps = {});

}  // namespace swarmsim
