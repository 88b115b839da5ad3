#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "swarmsim/engine/rng.hpp"

namespace swarmsim {

// One non-negative time in seconds per line, '#' comments and blank lines
// skipped. Returns the times sorted and multiplied by `compression`. Throws
// std::runtime_error naming the line on malformed input or an empty trace.
std::vector<double> parse_trace(std::istream& in, double compression = 1.0);
std::vector<double> load_trace(const std::string& path, double compression = 1.0);

// Arrivals of a process with rate peak * exp(-t / decay). The first arrival is
// at 0; the other n - 1 are independent draws from the exponential density
// truncated to the horizon in which the process expects n arrivals (no
// truncation if it never does). Sorted ascending.
std::vector<double> gen_flash_crowd(std::size_t n, double peak_rate, double decay, Rng& rng);

// Horizon used by gen_flash_crowd; +inf when n >= peak_rate * decay.
double flash_crowd_horizon(std::size_t n, double peak_rate, double decay);

}  // namespace swarmsim
