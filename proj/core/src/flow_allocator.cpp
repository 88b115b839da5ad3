#include "swarmsim/engine/flow_allocator.hpp"

#include <algorithm>
#include <stdexcept>

namespace swarmsim {
namespace {

constexpr std::uint32_t kNoConstraint = ~std::uint32_t{0};

}  // namespace

double FlowAllocation::rate(std::uint32_t uploader,
                            std::uint32_t downloader) const {
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (edges[i].uploader == uploader && edges[i].downloader == downloader) {
      return rates[i];
    }
  }
  return 0.0;
}

const FlowAllocation& FlowAllocator::allocate(
    std::span<const FlowEdge> edges, std::span<const NodeCapacity> nodes,
    std::span<const double> pool_caps) {
  const auto n_nodes = static_cast<std::uint32_t>(nodes.size());
  const auto n_pools = static_cast<std::uint32_t>(pool_caps.size());
  const auto n_edges = static_cast<std::uint32_t>(edges.size());

  std::uint32_t n_capped = 0;
  for (const auto& e : edges) {
    if (e.uploader >= n_nodes || e.downloader >= n_nodes) {
      throw std::out_of_range("flow edge references an unknown node");
    }
    if (e.pool >= 0 && static_cast<std::uint32_t>(e.pool) >= n_pools) {
      throw std::out_of_range("flow edge references an unknown pool");
    }
    if (e.cap_bps != kUncapped) ++n_capped;
  }

  const std::uint32_t pool_base = 2 * n_nodes;
  const std::uint32_t cap_base = pool_base + n_pools;
  const std::uint32_t n_constraints = cap_base + n_capped;

  cap_.assign(n_constraints, 0.0);
  frozen_sum_.assign(n_constraints, 0.0);
  active_.assign(n_constraints, 0);
  version_.assign(n_constraints, 0);
  edge_constraints_.assign(static_cast<std::size_t>(n_edges) * 4, kNoConstraint);
  edge_frozen_.assign(n_edges, 0);

  for (std::uint32_t i = 0; i < n_nodes; ++i) {
    cap_[i] = std::max(0.0, nodes[i].up_bps);
    cap_[n_nodes + i] = std::max(0.0, nodes[i].down_bps);
  }
  for (std::uint32_t p = 0; p < n_pools; ++p) {
    cap_[pool_base + p] = std::max(0.0, pool_caps[p]);
  }

  std::uint32_t next_cap = cap_base;
  for (std::uint32_t e = 0; e < n_edges; ++e) {
    auto* slots = &edge_constraints_[static_cast<std::size_t>(e) * 4];
    slots[0] = edges[e].uploader;
    slots[1] = n_nodes + edges[e].downloader;
    if (edges[e].pool >= 0) {
      slots[2] = pool_base + static_cast<std::uint32_t>(edges[e].pool);
    }
    if (edges[e].cap_bps != kUncapped) {
      cap_[next_cap] = std::max(0.0, edges[e].cap_bps);
      slots[3] = next_cap++;
    }
    for (int s = 0; s < 4; ++s) {
      if (slots[s] != kNoConstraint) ++active_[slots[s]];
    }
  }

  // Constraint -> member edges, CSR layout.
  member_offset_.assign(n_constraints + 1, 0);
  for (std::uint32_t c = 0; c < n_constraints; ++c) {
    member_offset_[c + 1] = member_offset_[c] + active_[c];
  }
  members_.assign(member_offset_[n_constraints], 0);
  {
    std::vector<std::uint32_t> fill(member_offset_.begin(),
                                    member_offset_.end() - 1);
    for (std::uint32_t e = 0; e < n_edges; ++e) {
      const auto* slots = &edge_constraints_[static_cast<std::size_t>(e) * 4];
      for (int s = 0; s < 4; ++s) {
        if (slots[s] != kNoConstraint) members_[fill[slots[s]]++] = e;
      }
    }
  }

  auto heap_cmp = [](const HeapEntry& a, const HeapEntry& b) {
    if (a.level != b.level) return a.level > b.level;
    return a.constraint > b.constraint;
  };
  auto saturation_level = [&](std::uint32_t c) {
    return std::max(0.0, (cap_[c] - frozen_sum_[c]) / active_[c]);
  };

  heap_.clear();
  for (std::uint32_t c = 0; c < n_constraints; ++c) {
    if (active_[c] > 0) heap_.push_back({saturation_level(c), c, 0});
  }
  std::make_heap(heap_.begin(), heap_.end(), heap_cmp);

  result_.edges.assign(edges.begin(), edges.end());
  result_.rates.assign(n_edges, 0.0);

  double level = 0.0;
  while (!heap_.empty()) {
    std::pop_heap(heap_.begin(), heap_.end(), heap_cmp);
    const HeapEntry top = heap_.back();
    heap_.pop_back();
    const std::uint32_t c = top.constraint;
    if (top.version != version_[c] || active_[c] == 0) continue;
    level = std::max(level, top.level);
    for (std::uint32_t m = member_offset_[c]; m < member_offset_[c + 1]; ++m) {
      const std::uint32_t e = members_[m];
      if (edge_frozen_[e]) continue;
      edge_frozen_[e] = 1;
      result_.rates[e] = level;
      const auto* slots = &edge_constraints_[static_cast<std::size_t>(e) * 4];
      for (int s = 0; s < 4; ++s) {
        const std::uint32_t c2 = slots[s];
        if (c2 == kNoConstraint) continue;
        frozen_sum_[c2] += level;
        --active_[c2];
        ++version_[c2];
        if (active_[c2] > 0 && c2 != c) {
          heap_.push_back({saturation_level(c2), c2, version_[c2]});
          std::push_heap(heap_.begin(), heap_.end(), heap_cmp);
        }
      }
    }
  }

  result_.residual_up.assign(n_nodes, 0.0);
  result_.residual_down.assign(n_nodes, 0.0);
  for (std::uint32_t i = 0; i < n_nodes; ++i) {
    result_.residual_up[i] = cap_[i];
    result_.residual_down[i] = cap_[n_nodes + i];
  }
  for (std::uint32_t e = 0; e < n_edges; ++e) {
    result_.residual_up[edges[e].uploader] -= result_.rates[e];
    result_.residual_down[edges[e].downloader] -= result_.rates[e];
  }
  return result_;
}

FlowAllocation allocate_flows(std::span<const FlowEdge> edges,
                              std::span<const NodeCapacity> nodes,
                              std::span<const double> pool_caps) {
  FlowAllocator allocator;
  return allocator.allocate(edges, nodes, pool_caps);
}

}  // namespace swarmsim
