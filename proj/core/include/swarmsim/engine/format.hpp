#pragma once

#include <charconv>
#include <string>

namespace swarmsim {

// Shortest decimal form that parses back to the same double. Independent of
// locale and stream state, so output files stay byte-identical across runs.
inline std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace swarmsim
