#include "swarmsim/engine/flow_allocator.hpp"

#include <gtest/gtest.h>

#include <vector>

#include "swarmsim/engine/rng.hpp"
#include "support/maxmin_oracle.hpp"

namespace swarmsim {
namespace {

using testing::max_min_violation;

TEST(FlowAllocator, SingleEdgeTakesMinOfEnds) {
  std::vector<NodeCapacity> nodes = {{100, 0}, {0, 30}};
  std::vector<FlowEdge> edges = {{0, 1}};
  const auto a = allocate_flows(edges, nodes);
  EXPECT_DOUBLE_EQ(a.rate(0, 1), 30.0);
  EXPECT_DOUBLE_EQ(a.residual_up[0], 70.0);
  EXPECT_DOUBLE_EQ(a.rate(1, 0), 0.0);
}

TEST(FlowAllocator, UploaderSplitsEvenlyThenRedistributes) {
  // Seed with 90 up feeding a slow (10) and two fast downloaders.
  std::vector<NodeCapacity> nodes = {{90, 0}, {0, 10}, {0, 100}, {0, 100}};
  std::vector<FlowEdge> edges = {{0, 1}, {0, 2}, {0, 3}};
  const auto a = allocate_flows(edges, nodes);
  EXPECT_DOUBLE_EQ(a.rate(0, 1), 10.0);
  EXPECT_DOUBLE_EQ(a.rate(0, 2), 40.0);
  EXPECT_DOUBLE_EQ(a.rate(0, 3), 40.0);
}

TEST(FlowAllocator, PoolBoundsSumOfTaggedEdges) {
  std::vector<NodeCapacity> nodes = {{100, 0}, {0, 100}, {0, 100}, {0, 100}};
  std::vector<FlowEdge> edges = {{0, 1, kUncapped, 0}, {0, 2, kUncapped, 0}, {0, 3, kUncapped, 1}};
  std::vector<double> pools = {20, 80};
  const auto a = allocate_flows(edges, nodes, pools);
  EXPECT_DOUBLE_EQ(a.rate(0, 1), 10.0);
  EXPECT_DOUBLE_EQ(a.rate(0, 2), 10.0);
  EXPECT_DOUBLE_EQ(a.rate(0, 3), 80.0);
}

TEST(FlowAllocator, EmptyInput) {
  std::vector<NodeCapacity> nodes = {{1, 1}};
  const auto a = allocate_flows({}, nodes);
  EXPECT_TRUE(a.rates.empty());
  EXPECT_DOUBLE_EQ(a.residual_up[0], 1.0);
}

TEST(FlowAllocator, MatchesOracleOnRandomSmallFixtures) {
  Rng rng = make_stream(7, StreamTag::kFixture);
  FlowAllocator alloc;
  for (int trial = 0; trial < 3000; ++trial) {
    const auto f = testing::random_fixture(rng, 2 + uniform_index(rng, 5));
    const auto& got = alloc.allocate(f.edges, f.nodes, f.pools);
    const auto want = testing::water_fill(f);
    ASSERT_EQ(got.rates.size(), want.size());
    for (std::size_t e = 0; e < want.size(); ++e) {
      ASSERT_NEAR(got.rates[e], want[e], 1e-6) << "trial " << trial << " edge " << e;
    }
    ASSERT_EQ(max_min_violation(f, got.rates), "") << "trial " << trial;
  }
}

TEST(FlowAllocator, AllEdgeSubsetsOnThreeNodes) {
  for (const auto& f : testing::three_node_fixtures()) {
    const auto a = allocate_flows(f.edges, f.nodes);
    ASSERT_EQ(max_min_violation(f, a.rates), "");
  }
}

}  // namespace
}  // namespace swarmsim
