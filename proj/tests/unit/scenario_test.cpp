#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "swarmsim/scenario/config.hpp"
#include "swarmsim/scenario/population.hpp"
#include "swarmsim/scenario/trace.hpp"

namespace swarmsim {
namespace {

TEST(Config, SerializeParseRoundTrip) {
  ScenarioConfig c;
  c.run_id = "x";
  c.seed = 99;
  c.reward.reservation = 0.25;
  c.population(Role::kLeech).trading = TradingKind::kTyrant;
  c.population(Role::kAltruistic).seeding = SeedingKind::kRewardLottery;
  c.bandwidth_classes = {1e5, 3e5};
  c.tyrant.self_identify = false;
  const auto text = serialize_config(c);
  const auto back = parse_config_string(text);
  EXPECT_EQ(back, c);
  EXPECT_EQ(serialize_config(back), text);
  EXPECT_EQ(parse_config_string(""), ScenarioConfig{});
}

TEST(Config, FractionsMustSumToOne) {
  ScenarioConfig c;
  c.population(Role::kStandard).fraction = 0.6;
  try {
    c.validate();
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(e.key().find("fraction"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("fraction"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("0.9"), std::string::npos);
  }
}

TEST(Config, ErrorsNameKeyAndLine) {
  try {
    parse_config_string("# comment\n\nreward.reservation = 0.5\nreward.bogus = 1\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "reward.bogus");
    EXPECT_EQ(e.line(), 4u);
  }
  try {
    parse_config_string("reward.reservation = lots\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "reward.reservation");
  }
  EXPECT_THROW(parse_config_string("reward.reservation = 1.5\n"), ConfigError);
  try {
    parse_config_string(
        "populations.altruistic.fraction = 0.1\n"
        "populations.standard.fraction = 0.6\n"
        "populations.leech.fraction = 0.2\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("fraction"), std::string::npos);
  }
}

TEST(Config, SchemaCoversSerializedKeys) {
  std::istringstream in(serialize_config(ScenarioConfig{}));
  const auto schema = config_schema();
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto key = line.substr(0, line.find(' '));
    const bool found = std::any_of(schema.begin(), schema.end(),
                                   [&](const auto& kv) { return kv.first == key; });
    EXPECT_TRUE(found) << key;
  }
}

TEST(Trace, ParseSortsAndCompresses) {
  std::istringstream in("# joins\n30\n\n10.5\n0\n");
  EXPECT_EQ(parse_trace(in, 0.1), (std::vector<double>{0.0, 1.05, 3.0}));
}

TEST(Trace, ParseRejectsBadLines) {
  for (const char* text : {"1\n-2\n", "1\nabc\n", "", "# only comments\n"}) {
    std::istringstream in(text);
    EXPECT_THROW(parse_trace(in), std::runtime_error) << text;
  }
  try {
    std::istringstream in("1\n2\nx\n");
    parse_trace(in);
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find('3'), std::string::npos);
  }
}

TEST(Trace, FlashCrowdHorizonExpectsNArrivals) {
  const double peak = 0.006, decay = 1e5;
  const double h = flash_crowd_horizon(200, peak, decay);
  EXPECT_NEAR(peak * decay * (1 - std::exp(-h / decay)), 200.0, 1e-9);
  EXPECT_TRUE(std::isinf(flash_crowd_horizon(601, peak, decay)));
}

TEST(Trace, FlashCrowdMeanMatchesTruncatedExponential) {
  const double peak = 0.006, decay = 1e5;
  const std::size_t n = 200;
  const double h = flash_crowd_horizon(n, peak, decay);
  // Mean of an exponential with scale `decay` truncated to [0, h].
  const double q = std::exp(-h / decay);
  const double want = decay - h * q / (1 - q);
  double sum = 0.0;
  std::size_t count = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    Rng rng = make_stream(s, StreamTag::kArrivals);
    const auto t = gen_flash_crowd(n, peak, decay, rng);
    ASSERT_EQ(t.size(), n);
    ASSERT_EQ(t.front(), 0.0);
    ASSERT_TRUE(std::is_sorted(t.begin(), t.end()));
    ASSERT_LE(t.back(), h);
    sum += std::accumulate(t.begin() + 1, t.end(), 0.0);
    count += n - 1;
  }
  // 39800 draws; the standard error is well under 0.5% of the mean.
  EXPECT_NEAR(sum / count, want, 0.01 * want);
}

TEST(Population, RoleCountsLargestRemainder) {
  EXPECT_EQ(role_counts(200, {0.1, 0.7, 0.2}), (std::array<std::size_t, 3>{20, 140, 40}));
  EXPECT_EQ(role_counts(10, {1.0 / 3, 1.0 / 3, 1.0 / 3}), (std::array<std::size_t, 3>{4, 3, 3}));
  EXPECT_EQ(role_counts(7, {0.0, 0.0, 1.0}), (std::array<std::size_t, 3>{0, 0, 7}));
}

TEST(Population, CountsBandwidthAndDurations) {
  ScenarioConfig cfg;
  const auto joins = scenario_join_times(cfg);
  ASSERT_EQ(joins.size(), cfg.node_count);
  const auto nodes = build_population(cfg, joins);
  ASSERT_EQ(nodes.size(), cfg.node_count + cfg.initial_seeds);
  std::array<std::size_t, 4> by_role{};
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    EXPECT_EQ(n.id, i);
    ++by_role[static_cast<std::size_t>(n.role)];
    if (n.role == Role::kInitialSeed) {
      EXPECT_EQ(n.join_s, 0.0);
      EXPECT_TRUE(std::isinf(n.seed_duration_s));
      continue;
    }
    const auto& pop = cfg.population(n.role);
    EXPECT_GE(n.seed_duration_s, pop.seed_min_s * cfg.time_compression);
    EXPECT_LE(n.seed_duration_s, pop.seed_max_s * cfg.time_compression);
    EXPECT_DOUBLE_EQ(n.bandwidth.up_bps, cfg.upload_ratio * n.bandwidth.down_bps);
    EXPECT_NE(std::find(cfg.bandwidth_classes.begin(), cfg.bandwidth_classes.end(),
                        n.bandwidth.down_bps),
              cfg.bandwidth_classes.end());
    if (i > cfg.initial_seeds) EXPECT_GE(n.join_s, nodes[i - 1].join_s);
  }
  EXPECT_EQ(by_role[0], 20u);
  EXPECT_EQ(by_role[1], 140u);
  EXPECT_EQ(by_role[2], 40u);
  EXPECT_EQ(by_role[3], 1u);
}

TEST(Population, ClassesBalancedWithinRole) {
  ScenarioConfig cfg;
  cfg.seed = 5;
  const auto nodes = build_population(cfg, scenario_join_times(cfg));
  // 140 standard nodes over six classes: every class gets 23 or 24.
  std::map<double, int> per_class;
  for (const auto& n : nodes) {
    if (n.role == Role::kStandard) ++per_class[n.bandwidth.down_bps];
  }
  ASSERT_EQ(per_class.size(), 6u);
  for (const auto& [k, c] : per_class) {
    EXPECT_GE(c, 23);
    EXPECT_LE(c, 24);
  }
}

TEST(Population, DeterministicPerSeed) {
  ScenarioConfig cfg;
  const auto a = build_population(cfg, scenario_join_times(cfg));
  const auto b = build_population(cfg, scenario_join_times(cfg));
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].role, b[i].role);
    EXPECT_EQ(a[i].join_s, b[i].join_s);
    EXPECT_EQ(a[i].bandwidth.down_bps, b[i].bandwidth.down_bps);
  }
}

}  // namespace
}  // namespace swarmsim
