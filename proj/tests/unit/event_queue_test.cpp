#include "swarmsim/engine/event_queue.hpp"

#include <gtest/gtest.h>

#include <vector>

#include "swarmsim/engine/rng.hpp"

namespace swarmsim {
namespace {

std::vector<std::uint32_t> drain(EventQueue& q, SimTime until = SimTime::max()) {
  std::vector<std::uint32_t> seen;
  q.run_until(until, [&](const Event& e) {
    if (e.kind != EventKind::kFlowRecompute) seen.push_back(e.node);
  });
  return seen;
}

TEST(EventQueue, JoinAtZeroDispatches) {
  EventQueue q;
  q.schedule(SimTime::zero(), EventKind::kNodeJoin, 7);
  std::vector<Event> seen;
  EXPECT_TRUE(q.step([&](const Event& e) { seen.push_back(e); }));
  ASSERT_EQ(seen.size(), 1u);
  EXPECT_EQ(seen[0].node, 7u);
  EXPECT_EQ(q.now(), SimTime::zero());
}

TEST(EventQueue, EqualTimesKeepInsertionOrder) {
  EventQueue q;
  const auto t5 = SimTime::from_seconds(5);
  q.schedule(t5, EventKind::kNodeJoin, 1);
  q.schedule(t5, EventKind::kNodeJoin, 2);
  EXPECT_EQ(drain(q), (std::vector<std::uint32_t>{1, 2}));
}

TEST(EventQueue, CancelledEventNeverRuns) {
  EventQueue q;
  auto h = q.schedule(SimTime::from_seconds(3), EventKind::kNodeJoin, 1);
  q.schedule(SimTime::from_seconds(4), EventKind::kNodeJoin, 2);
  EXPECT_TRUE(q.cancel(h));
  EXPECT_FALSE(q.cancel(h));
  EXPECT_EQ(drain(q), (std::vector<std::uint32_t>{2}));
  EXPECT_FALSE(q.cancel(EventHandle{}));
}

TEST(EventQueue, StaleHandleDoesNotCancelReusedSlot) {
  EventQueue q;
  auto h = q.schedule(SimTime::from_seconds(1), EventKind::kNodeJoin, 1);
  drain(q);
  q.schedule(SimTime::from_seconds(2), EventKind::kNodeJoin, 2);
  EXPECT_FALSE(q.cancel(h));
  EXPECT_EQ(drain(q), (std::vector<std::uint32_t>{2}));
}

TEST(EventQueue, RejectsPast) {
  EventQueue q;
  q.schedule(SimTime::from_seconds(10), EventKind::kNodeJoin);
  drain(q);
  EXPECT_THROW(q.schedule(SimTime::from_seconds(9), EventKind::kNodeJoin), std::invalid_argument);
  EXPECT_THROW(q.run_until(SimTime::from_seconds(1), [](const Event&) {}),
               std::invalid_argument);
}

TEST(EventQueue, RunUntilEmptyQueue) {
  EventQueue q;
  EXPECT_EQ(q.run_until(SimTime::from_seconds(100), [](const Event&) {}), 0u);
}

TEST(EventQueue, RunUntilStopsAtHorizon) {
  EventQueue q;
  for (int t : {1, 2, 3}) q.schedule(SimTime::from_seconds(t), EventKind::kNodeJoin, t);
  EXPECT_EQ(q.run_until(SimTime::from_seconds(2), [](const Event&) {}), 2u);
  EXPECT_EQ(q.now(), SimTime::from_seconds(2));
  EXPECT_EQ(q.pending(), 1u);
}

TEST(EventQueue, SimultaneousChangesCoalesceIntoOneRecompute) {
  EventQueue q;
  const auto t = SimTime::from_seconds(1);
  for (int i = 0; i < 5; ++i) q.schedule(t, EventKind::kNodeJoin, i);
  q.schedule(SimTime::from_seconds(2), EventKind::kNodeJoin, 99);
  std::vector<std::pair<EventKind, SimTime>> log;
  q.run_until(SimTime::max(), [&](const Event& e) {
    log.emplace_back(e.kind, q.now());
    if (e.kind == EventKind::kNodeJoin && e.node < 5) q.request_recompute();
  });
  // Five joins, one recompute at t=1 after all of them, then the t=2 join.
  ASSERT_EQ(log.size(), 7u);
  EXPECT_EQ(log[5].first, EventKind::kFlowRecompute);
  EXPECT_EQ(log[5].second, t);
  EXPECT_EQ(log[6].first, EventKind::kNodeJoin);
  EXPECT_EQ(q.recomputes(), 1u);
}

TEST(EventQueue, RandomScheduleCancelMatchesSortedOrder) {
  // Property: whatever is scheduled and not cancelled comes out in
  // (time, insertion) order.
  Rng rng = make_stream(42, StreamTag::kFixture);
  EventQueue q;
  struct Item {
    std::int64_t t;
    std::uint32_t id;
    EventHandle h;
    bool cancelled = false;
  };
  std::vector<Item> items;
  for (std::uint32_t i = 0; i < 2000; ++i) {
    const auto t = static_cast<std::int64_t>(uniform_index(rng, 300));
    items.push_back({t, i, q.schedule(SimTime::from_micros(t), EventKind::kNodeJoin, i)});
    if (uniform_index(rng, 3) == 0) {
      auto& victim = items[uniform_index(rng, items.size())];
      if (!victim.cancelled) {
        EXPECT_TRUE(q.cancel(victim.h));
        victim.cancelled = true;
      }
    }
  }
  std::vector<Item> expected;
  for (const auto& it : items) {
    if (!it.cancelled) expected.push_back(it);
  }
  std::stable_sort(expected.begin(), expected.end(),
                   [](const Item& a, const Item& b) { return a.t < b.t; });
  const auto seen = drain(q);
  ASSERT_EQ(seen.size(), expected.size());
  for (std::size_t i = 0; i < seen.size(); ++i) EXPECT_EQ(seen[i], expected[i].id);
  EXPECT_TRUE(q.empty());
}

TEST(SimTime, AfterAlwaysAdvances) {
  const auto t = SimTime::from_seconds(1);
  EXPECT_GT(t.after(1e-12), t);
  EXPECT_EQ(t.after(0.0), t);
  EXPECT_EQ(t.after(0.5).micros(), 1'500'000);
}

}  // namespace
}  // namespace swarmsim
