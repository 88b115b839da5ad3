#include "swarmsim/scenario/population.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "swarmsim/scenario/trace.hpp"

namespace swarmsim {

std::array<std::size_t, kPopulationCount> role_counts(
    std::size_t n, const std::array<double, kPopulationCount>& fractions) {
  std::array<std::size_t, kPopulationCount> counts{};
  std::array<double, kPopulationCount> remainder{};
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < kPopulationCount; ++i) {
    const double exact = fractions[i] * static_cast<double>(n);
    // Guard against 0.7 * 10 evaluating to 6.9999999.
    const double floored = std::floor(exact + 1e-9);
    counts[i] = static_cast<std::size_t>(floored);
    remainder[i] = exact - floored;
    assigned += counts[i];
  }
  std::array<std::size_t, kPopulationCount> order{};
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++counts[order[k % kPopulationCount]];
  while (assigned > n) {
    // Only reachable when fractions overshoot 1 by rounding noise.
    auto& largest = *std::max_element(counts.begin(), counts.end());
    --largest;
    --assigned;
  }
  return counts;
}

std::vector<double> scenario_join_times(const ScenarioConfig& cfg) {
  std::vector<double> times;
  if (!cfg.trace_file.empty()) {
    times = load_trace(cfg.trace_file, cfg.time_compression);
    if (times.size() < cfg.node_count) {
      throw std::runtime_error("trace has fewer join times than swarm.node_count");
    }
    times.resize(cfg.node_count);
    return times;
  }
  Rng rng = make_stream(cfg.seed, StreamTag::kArrivals);
  times = gen_flash_crowd(cfg.node_count, cfg.trace_peak_rate, cfg.trace_decay_s, rng);
  for (double& t : times) t *= cfg.time_compression;
  return times;
}

std::vector<NodeSpec> build_population(const ScenarioConfig& cfg,
                                       std::span<const double> join_times) {
  if (join_times.size() != cfg.node_count) {
    throw std::invalid_argument("join time count does not match node_count");
  }
  std::vector<NodeSpec> nodes;
  nodes.reserve(cfg.initial_seeds + cfg.node_count);

  for (std::size_t i = 0; i < cfg.initial_seeds; ++i) {
    NodeSpec s;
    s.id = static_cast<NodeId>(i);
    s.role = Role::kInitialSeed;
    s.bandwidth = {cfg.initial_seed_upload_bps, cfg.initial_seed_upload_bps};
    s.join_s = 0.0;
    s.seed_duration_s = std::numeric_limits<double>::infinity();
    nodes.push_back(s);
  }

  std::array<double, kPopulationCount> fractions{};
  for (std::size_t i = 0; i < kPopulationCount; ++i) fractions[i] = cfg.populations[i].fraction;
  const auto counts = role_counts(cfg.node_count, fractions);
  std::vector<Role> roles;
  roles.reserve(cfg.node_count);
  for (std::size_t r = 0; r < kPopulationCount; ++r) {
    roles.insert(roles.end(), counts[r], static_cast<Role>(r));
  }
  Rng role_rng = make_stream(cfg.seed, StreamTag::kRoles);
  for (std::size_t i = 0; i + 1 < roles.size(); ++i) {
    std::swap(roles[i], roles[i + uniform_index(role_rng, roles.size() - i)]);
  }

  // Each role gets the classes in equal shares (the remainder going to a
  // random subset), shuffled. Every node's class is still uniform, but role
  // medians no longer swing with how many slow nodes a small role drew.
  const std::size_t n_classes = cfg.bandwidth_classes.size();
  Rng bw = make_stream(cfg.seed, StreamTag::kBandwidth);
  std::array<std::vector<double>, kPopulationCount> class_pool;
  for (std::size_t r = 0; r < kPopulationCount; ++r) {
    std::vector<std::size_t> perm(n_classes);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = 0; i + 1 < n_classes; ++i) {
      std::swap(perm[i], perm[i + uniform_index(bw, n_classes - i)]);
    }
    auto& pool = class_pool[r];
    for (std::size_t j = 0; j < counts[r]; ++j) {
      pool.push_back(cfg.bandwidth_classes[perm[j % n_classes]]);
    }
    for (std::size_t i = 0; i + 1 < pool.size(); ++i) {
      std::swap(pool[i], pool[i + uniform_index(bw, pool.size() - i)]);
    }
  }
  std::array<std::size_t, kPopulationCount> next_class{};

  for (std::size_t i = 0; i < cfg.node_count; ++i) {
    NodeSpec s;
    s.id = static_cast<NodeId>(cfg.initial_seeds + i);
    s.role = roles[i];
    s.join_s = join_times[i];

    const auto r = static_cast<std::size_t>(s.role);
    const double down = class_pool[r][next_class[r]++];
    s.bandwidth = {down, cfg.symmetric ? down : down * cfg.upload_ratio};

    const auto& pop = cfg.population(s.role);
    Rng dur = make_stream(cfg.seed, s.id, StreamTag::kSeedDuration);
    const double raw = pop.seed_min_s + (pop.seed_max_s - pop.seed_min_s) * uniform01(dur);
    s.seed_duration_s = raw * cfg.time_compression;

    Rng ident = make_stream(cfg.seed, s.id, StreamTag::kIdentity);
    const bool legacy = cfg.legacy_fraction > 0.0 && uniform01(ident) < cfg.legacy_fraction;
    if (!legacy) s.identity = LongTermId{ident()};
    nodes.push_back(s);
  }
  return nodes;
}

}  // namespace swarmsim
