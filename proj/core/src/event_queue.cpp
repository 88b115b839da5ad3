#include "swarmsim/engine/event_queue.hpp"

#include <stdexcept>

namespace swarmsim {

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kNodeJoin: return "node-join";
    case EventKind::kNodeDepart: return "node-depart";
    case EventKind::kChokeRound: return "choke-round";
    case EventKind::kOptimisticRound: return "optimistic-round";
    case EventKind::kTransferProgress: return "transfer-progress";
    case EventKind::kTrackerReannounce: return "tracker-reannounce";
    case EventKind::kSeedExpiry: return "seed-expiry";
    case EventKind::kFlowRecompute: return "flow-recompute";
  }
  return "unknown";
}

bool EventQueue::before(std::uint32_t a, std::uint32_t b) const {
  const Event& x = slots_[a].event;
  const Event& y = slots_[b].event;
  if (x.fire_at != y.fire_at) return x.fire_at < y.fire_at;
  return x.sequence < y.sequence;
}

void EventQueue::place(std::uint32_t pos, std::uint32_t slot) {
  heap_[pos] = slot;
  slots_[slot].heap_pos = pos;
}

void EventQueue::sift_up(std::uint32_t pos) {
  const std::uint32_t slot = heap_[pos];
  while (pos > 0) {
    const std::uint32_t parent = (pos - 1) / 2;
    if (!before(slot, heap_[parent])) break;
    place(pos, heap_[parent]);
    pos = parent;
  }
  place(pos, slot);
}

void EventQueue::sift_down(std::uint32_t pos) {
  const std::uint32_t slot = heap_[pos];
  const auto n = static_cast<std::uint32_t>(heap_.size());
  while (true) {
    std::uint32_t child = 2 * pos + 1;
    if (child >= n) break;
    if (child + 1 < n && before(heap_[child + 1], heap_[child])) ++child;
    if (!before(heap_[child], slot)) break;
    place(pos, heap_[child]);
    pos = child;
  }
  place(pos, slot);
}

void EventQueue::remove_at(std::uint32_t pos) {
  const std::uint32_t slot = heap_[pos];
  slots_[slot].heap_pos = kFree;
  slots_[slot].event.sequence = EventHandle::kInvalid;
  free_.push_back(slot);
  const std::uint32_t last = heap_.back();
  heap_.pop_back();
  if (pos == heap_.size()) return;
  place(pos, last);
  sift_down(pos);
  sift_up(slots_[last].heap_pos);
}

EventHandle EventQueue::schedule(SimTime at, EventKind kind, std::uint32_t node,
                                 std::uint32_t peer, std::uint64_t aux) {
  if (at < now_) {
    throw std::invalid_argument("cannot schedule an event in the past");
  }
  std::uint32_t slot;
  if (free_.empty()) {
    slot = static_cast<std::uint32_t>(slots_.size());
    slots_.emplace_back();
  } else {
    slot = free_.back();
    free_.pop_back();
  }
  const std::uint64_t seq = next_sequence_++;
  slots_[slot].event = Event{at, seq, kind, node, peer, aux};
  heap_.push_back(slot);
  place(static_cast<std::uint32_t>(heap_.size() - 1), slot);
  sift_up(static_cast<std::uint32_t>(heap_.size() - 1));
  return EventHandle{seq, slot};
}

bool EventQueue::cancel(EventHandle handle) {
  if (!handle.valid() || handle.slot >= slots_.size()) return false;
  const Slot& s = slots_[handle.slot];
  if (s.heap_pos == kFree || s.event.sequence != handle.sequence) return false;
  remove_at(s.heap_pos);
  return true;
}

bool EventQueue::step(const Handler& handler) {
  if (recompute_pending_ &&
      (heap_.empty() || slots_[heap_.front()].event.fire_at > now_)) {
    recompute_pending_ = false;
    ++recomputes_;
    ++dispatched_;
    handler(Event{now_, EventHandle::kInvalid, EventKind::kFlowRecompute});
    return true;
  }
  if (heap_.empty()) return false;
  const Event ev = slots_[heap_.front()].event;
  remove_at(0);
  now_ = ev.fire_at;
  ++dispatched_;
  handler(ev);
  return true;
}

std::uint64_t EventQueue::run_until(SimTime t_end, const Handler& handler) {
  if (t_end < now_) {
    throw std::invalid_argument("run_until target is earlier than the clock");
  }
  stopped_ = false;
  std::uint64_t count = 0;
  while (!stopped_) {
    const bool recompute_due =
        recompute_pending_ &&
        (heap_.empty() || slots_[heap_.front()].event.fire_at > now_);
    if (!recompute_due &&
        (heap_.empty() || slots_[heap_.front()].event.fire_at > t_end)) {
      break;
    }
    step(handler);
    ++count;
  }
  if (!stopped_ && !heap_.empty() && now_ < t_end) now_ = t_end;
  return count;
}

}  // namespace swarmsim
