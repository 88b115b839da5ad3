#include <benchmark/benchmark.h>

#include <vector>

#include "swarmsim/engine/event_queue.hpp"
#include "swarmsim/engine/flow_allocator.hpp"
#include "swarmsim/engine/rng.hpp"
#include "swarmsim/experiment/presets.hpp"
#include "swarmsim/swarm/swarm.hpp"

namespace {

using namespace swarmsim;

// Each node uploads to `degree` random peers, roughly the shape of a swarm
// with four unchoke slots plus seeding slots.
void BM_FlowAllocation(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::size_t degree = 5;
  Rng rng = make_stream(1, StreamTag::kFixture);
  std::vector<NodeCapacity> nodes(n);
  for (auto& c : nodes) {
    c.down_bps = 128e3 * static_cast<double>(1 + uniform_index(rng, 40));
    c.up_bps = c.down_bps / 2;
  }
  std::vector<FlowEdge> edges;
  for (std::uint32_t u = 0; u < n; ++u) {
    for (std::size_t k = 0; k < degree; ++k) {
      auto d = static_cast<std::uint32_t>(uniform_index(rng, n));
      if (d != u) edges.push_back({u, d});
    }
  }
  FlowAllocator alloc;
  for (auto _ : state) benchmark::DoNotOptimize(alloc.allocate(edges, nodes).rates.data());
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(edges.size()));
}
BENCHMARK(BM_FlowAllocation)->Arg(100)->Arg(1000)->Arg(10000);

void BM_EventQueue(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng = make_stream(2, StreamTag::kFixture);
  for (auto _ : state) {
    EventQueue q;
    for (std::size_t i = 0; i < n; ++i) {
      q.schedule(SimTime::from_micros(static_cast<std::int64_t>(uniform_index(rng, 1'000'000))),
                 EventKind::kTransferProgress);
    }
    std::size_t seen = 0;
    q.run_until(SimTime::max(), [&](const Event&) { ++seen; });
    benchmark::DoNotOptimize(seen);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_EventQueue)->Arg(1 << 10)->Arg(1 << 16);

void BM_SmallSwarm(benchmark::State& state) {
  ScenarioConfig cfg = base_config(Scale::kDesk);
  cfg.node_count = static_cast<std::size_t>(state.range(0));
  cfg.torrent.total_bytes = 8 * kMiB;
  for (auto _ : state) {
    const auto r = Swarm(cfg).run();
    benchmark::DoNotOptimize(r.stats.events);
    state.counters["events"] = static_cast<double>(r.stats.events);
  }
}
BENCHMARK(BM_SmallSwarm)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
