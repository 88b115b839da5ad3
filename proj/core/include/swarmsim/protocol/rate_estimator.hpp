#pragma once

#include <deque>

#include "swarmsim/engine/sim_time.hpp"

namespace swarmsim {

// Trailing-window average of a piecewise-constant rate. Because the flow model
// only changes rates at recompute points, integrating the recorded segments is
// exact: a constant rate reads back exactly once a full window has elapsed.
class RollingRate {
 public:
  explicit RollingRate(double window_seconds = 20.0) : window_(window_seconds) {}

  // The rate is `bps` from `at` onward.
  void record(SimTime at, double bps);

  // Average over [now - window, now]; time before the first record counts as
  // zero rate.
  double average(SimTime now) const;

  double current() const { return segments_.empty() ? 0.0 : segments_.back().bps; }
  double window() const { return window_; }

 private:
  struct Segment {
    SimTime start;
    double bps;
  };
  void prune(SimTime now);

  double window_;
  std::deque<Segment> segments_;
};

}  // namespace swarmsim
