#include "swarmsim/scenario/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <stdexcept>
#include <string>

namespace swarmsim {

std::vector<double> parse_trace(std::istream& in, double compression) {
  std::vector<double> times;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto e = line.find_last_not_of(" \t\r");
    const char* first = line.data() + b;
    const char* last = line.data() + e + 1;
    double t = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, t);
    if (ec != std::errc() || ptr != last || !std::isfinite(t)) {
      throw std::runtime_error("trace line " + std::to_string(line_no) + ": not a number");
    }
    if (t < 0.0) {
      throw std::runtime_error("trace line " + std::to_string(line_no) + ": negative time");
    }
    times.push_back(t * compression);
  }
  if (times.empty()) throw std::runtime_error("trace is empty");
  std::sort(times.begin(), times.end());
  return times;
}

std::vector<double> load_trace(const std::string& path, double compression) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace '" + path + "'");
  return parse_trace(in, compression);
}

double flash_crowd_horizon(std::size_t n, double peak_rate, double decay) {
  const double expected_total = peak_rate * decay;
  const auto want = static_cast<double>(n);
  if (want >= expected_total) return std::numeric_limits<double>::infinity();
  return -decay * std::log1p(-want / expected_total);
}

std::vector<double> gen_flash_crowd(std::size_t n, double peak_rate, double decay, Rng& rng) {
  if (n == 0) return {};
  if (!(peak_rate > 0.0) || !(decay > 0.0)) {
    throw std::invalid_argument("flash crowd needs positive peak rate and decay");
  }
  const double horizon = flash_crowd_horizon(n, peak_rate, decay);
  // Mass of the density on [0, horizon]; inverse-CDF sampling within it.
  const double mass = std::isinf(horizon) ? 1.0 : -std::expm1(-horizon / decay);
  std::vector<double> times;
  times.reserve(n);
  times.push_back(0.0);
  for (std::size_t i = 1; i < n; ++i) {
    const double u = uniform01(rng);
    times.push_back(-decay * std::log1p(-u * mass));
  }
  std::sort(times.begin(), times.end());
  return times;
}

}  // namespace swarmsim
