#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>

namespace swarmsim {

// Simulation clock value. Stored as whole microseconds so that ordering and
// arithmetic are exact; exposed as real-valued seconds.
class SimTime {
 public:
  constexpr SimTime() = default;

  static constexpr SimTime from_micros(std::int64_t us) { return SimTime(us); }
  static SimTime from_seconds(double s) {
    return SimTime(static_cast<std::int64_t>(std::llround(s * 1e6)));
  }
  static constexpr SimTime zero() { return SimTime(0); }
  static constexpr SimTime max() {
    return SimTime(std::numeric_limits<std::int64_t>::max());
  }

  constexpr std::int64_t micros() const { return us_; }
  constexpr double seconds() const { return static_cast<double>(us_) * 1e-6; }

  // Time `s` seconds later, rounded up to the next microsecond and never
  // equal to *this for s > 0.
  SimTime after(double s) const {
    if (s <= 0.0) return *this;
    auto d = static_cast<std::int64_t>(std::ceil(s * 1e6));
    return SimTime(us_ + (d < 1 ? 1 : d));
  }

  friend constexpr double seconds_between(SimTime from, SimTime to) {
    return static_cast<double>(to.us_ - from.us_) * 1e-6;
  }

  constexpr auto operator<=>(const SimTime&) const = default;

 private:
  constexpr explicit SimTime(std::int64_t us) : us_(us) {}
  std::int64_t us_ = 0;
};

}  // namespace swarmsim
