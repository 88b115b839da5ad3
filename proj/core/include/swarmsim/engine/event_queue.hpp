#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "swarmsim/engine/sim_time.hpp"

namespace swarmsim {

enum class EventKind : std::uint8_t {
  kNodeJoin,
  kNodeDepart,
  kChokeRound,
  kOptimisticRound,
  kTransferProgress,
  kTrackerReannounce,
  kSeedExpiry,
  kFlowRecompute,
};

std::string_view to_string(EventKind kind);

struct Event {
  SimTime fire_at;
  std::uint64_t sequence = 0;
  EventKind kind = EventKind::kNodeJoin;
  std::uint32_t node = 0;
  std::uint32_t peer = 0;
  std::uint64_t aux = 0;
};

struct EventHandle {
  static constexpr std::uint64_t kInvalid = ~std::uint64_t{0};
  std::uint64_t sequence = kInvalid;
  std::uint32_t slot = 0;
  bool valid() const { return sequence != kInvalid; }
};

// Deterministic event queue. Events are dispatched in (fire_at, sequence)
// order; sequence numbers are assigned at schedule time so equal-time events
// run in insertion order. Cancellation removes the entry from the heap
// immediately, so heavy rescheduling does not grow memory.
//
// Allocation-affecting changes call request_recompute(); the run loop then
// dispatches exactly one kFlowRecompute event after the last event sharing the
// current timestamp.
class EventQueue {
 public:
  using Handler = std::function<void(const Event&)>;

  // Throws std::invalid_argument if `at` is earlier than now().
  EventHandle schedule(SimTime at, EventKind kind, std::uint32_t node = 0,
                       std::uint32_t peer = 0, std::uint64_t aux = 0);

  // Returns false if the handle was already dispatched or cancelled.
  bool cancel(EventHandle handle);

  void request_recompute() { recompute_pending_ = true; }
  bool recompute_pending() const { return recompute_pending_; }

  // Pops and dispatches the next live event (or a pending recompute).
  // Returns false when nothing is left to dispatch.
  bool step(const Handler& handler);

  // Dispatches every event with fire_at <= t_end and returns how many were
  // dispatched (recomputes included). Throws std::invalid_argument if
  // t_end < now().
  std::uint64_t run_until(SimTime t_end, const Handler& handler);

  // Makes run_until return after the current event.
  void stop() { stopped_ = true; }
  bool stopped() const { return stopped_; }

  SimTime now() const { return now_; }
  bool empty() const { return heap_.empty(); }
  std::size_t pending() const { return heap_.size(); }
  std::uint64_t dispatched() const { return dispatched_; }
  std::uint64_t recomputes() const { return recomputes_; }
  std::uint64_t scheduled() const { return next_sequence_; }

 private:
  struct Slot {
    Event event;
    std::uint32_t heap_pos = kFree;
  };
  static constexpr std::uint32_t kFree = ~std::uint32_t{0};

  bool before(std::uint32_t a, std::uint32_t b) const;
  void sift_up(std::uint32_t pos);
  void sift_down(std::uint32_t pos);
  void place(std::uint32_t pos, std::uint32_t slot);
  void remove_at(std::uint32_t pos);

  std::vector<Slot> slots_;
  std::vector<std::uint32_t> free_;
  std::vector<std::uint32_t> heap_;  // slot indices
  SimTime now_;
  std::uint64_t next_sequence_ = 0;
  std::uint64_t dispatched_ = 0;
  std::uint64_t recomputes_ = 0;
  bool recompute_pending_ = false;
  bool stopped_ = false;
};

}  // namespace swarmsim
