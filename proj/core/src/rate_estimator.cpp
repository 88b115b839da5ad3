#include "swarmsim/protocol/rate_estimator.hpp"

#include <algorithm>

namespace swarmsim {

void RollingRate::record(SimTime at, double bps) {
  if (!segments_.empty()) {
    if (segments_.back().bps == bps) return;
    if (segments_.back().start == at) {
      segments_.back().bps = bps;
      return;
    }
  } else if (bps == 0.0) {
    return;
  }
  segments_.push_back({at, bps});
  prune(at);
}

void RollingRate::prune(SimTime now) {
  const SimTime horizon = SimTime::from_micros(
      now.micros() - static_cast<std::int64_t>(window_ * 1e6));
  // Keep the segment straddling the window start.
  while (segments_.size() >= 2 && segments_[1].start <= horizon) {
    segments_.pop_front();
  }
}

double RollingRate::average(SimTime now) const {
  if (segments_.empty()) return 0.0;
  const std::int64_t w_us = static_cast<std::int64_t>(window_ * 1e6);
  const std::int64_t lo = now.micros() - w_us;
  double integral = 0.0;  // bit-microseconds
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const std::int64_t s = std::max(segments_[i].start.micros(), lo);
    const std::int64_t e = i + 1 < segments_.size()
                               ? std::min(segments_[i + 1].start.micros(), now.micros())
                               : now.micros();
    if (e > s) integral += segments_[i].bps * static_cast<double>(e - s);
  }
  return integral / static_cast<double>(w_us);
}

}  // namespace swarmsim
