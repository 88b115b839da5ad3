#include "swarmsim/engine/rng.hpp"

namespace swarmsim {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t root, std::uint64_t node, StreamTag tag) {
  std::uint64_t h = splitmix64(root);
  h = splitmix64(h ^ node);
  h = splitmix64(h ^ static_cast<std::uint64_t>(tag));
  return h;
}

Rng make_stream(std::uint64_t root, std::uint64_t node, StreamTag tag) {
  return Rng(mix_seed(root, node, tag));
}

std::size_t uniform_index(Rng& rng, std::size_t n) {
  const std::uint64_t range = n;
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % range);
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return static_cast<std::size_t>(x % range);
}

double uniform01(Rng& rng) {
  // 53 random mantissa bits; avoids implementation-specific real
  // distributions so draws are identical across standard libraries.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace swarmsim
