#include "swarmsim/swarm/swarm.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "swarmsim/experiment/presets.hpp"
#include "swarmsim/experiment/sweep.hpp"

namespace swarmsim {
namespace {

namespace fs = std::filesystem;

ScenarioConfig small_config() {
  ScenarioConfig c;
  c.node_count = 24;
  c.torrent.total_bytes = 4 * kMiB;
  c.trace_peak_rate = 0.05;
  c.trace_decay_s = 2000.0;
  c.population(Role::kAltruistic).seed_min_s = 2000;
  c.population(Role::kAltruistic).seed_max_s = 4000;
  c.population(Role::kStandard).seed_min_s = 200;
  c.population(Role::kStandard).seed_max_s = 400;
  return c;
}

void expect_sound(const ScenarioConfig& cfg, const RunResult& r) {
  std::uint64_t up = 0, down = 0;
  for (const auto& rec : r.records) {
    up += rec.bytes_up;
    down += rec.bytes_down;
    if (rec.role == Role::kInitialSeed) continue;
    ASSERT_TRUE(rec.td_s.has_value()) << "node " << rec.id;
    EXPECT_EQ(rec.bytes_down - rec.duplicate_bytes, cfg.torrent.total_bytes);
    const auto e = efficiency(rec, cfg.torrent.total_bits());
    ASSERT_TRUE(e.has_value());
    EXPECT_GT(*e, 0.0);
    EXPECT_LE(*e, 1.0 + 1e-9);
    if (rec.role == Role::kLeech) EXPECT_DOUBLE_EQ(rec.leave_s, *rec.td_s);
  }
  EXPECT_EQ(up, down);
  EXPECT_EQ(r.stats.bytes_up, up);
  EXPECT_EQ(r.stats.bytes_down, down);
  EXPECT_GT(r.stats.events, 0u);
}

TEST(Swarm, SmallSwarmCompletesAndConserves) {
  const auto cfg = small_config();
  expect_sound(cfg, Swarm(cfg).run());
}

TEST(Swarm, RewardAndTyrantVariantsStaySound) {
  for (int variant = 0; variant < 4; ++variant) {
    auto cfg = small_config();
    cfg.seed = 3 + variant;
    cfg.population(Role::kAltruistic).seeding = SeedingKind::kRewardLottery;
    if (variant & 1) cfg.population(Role::kLeech).trading = TradingKind::kTyrant;
    if (variant & 2) {
      cfg.population(Role::kAltruistic).trading = TradingKind::kTyrant;
      cfg.reward.ignore_tyrants = true;
      cfg.tyrant.self_identify = variant != 3;
    }
    SCOPED_TRACE(variant);
    expect_sound(cfg, Swarm(cfg).run());
  }
}

TEST(Swarm, SameSeedSameResult) {
  const auto cfg = small_config();
  const auto a = Swarm(cfg).run();
  const auto b = Swarm(cfg).run();
  EXPECT_EQ(a.stats.events, b.stats.events);
  EXPECT_EQ(a.stats.messages, b.stats.messages);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].td_s, b.records[i].td_s);
    EXPECT_EQ(a.records[i].bytes_up, b.records[i].bytes_up);
  }
  auto other = cfg;
  other.seed = cfg.seed + 1;
  EXPECT_NE(Swarm(other).run().stats.events, a.stats.events);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Swarm, ReportsAreByteIdenticalAcrossRuns) {
  const auto cfg = small_config();
  const fs::path base = fs::path(::testing::TempDir()) / "swarmsim_swarm_test";
  fs::remove_all(base);
  const auto a = write_run_report(base / "a", cfg, Swarm(cfg).run());
  const auto b = write_run_report(base / "b", cfg, Swarm(cfg).run());
  EXPECT_EQ(slurp(a.nodes), slurp(b.nodes));
  EXPECT_EQ(slurp(a.summary), slurp(b.summary));
  EXPECT_EQ(slurp(a.efficiency_cdf), slurp(b.efficiency_cdf));
  EXPECT_EQ(slurp(a.membership), slurp(b.membership));
  EXPECT_EQ(slurp(a.manifest), slurp(b.manifest));
  fs::remove_all(base);
}

TEST(Swarm, HorizonStopsEarly) {
  auto cfg = small_config();
  cfg.horizon_s = 5.0;
  const auto r = Swarm(cfg).run();
  EXPECT_LE(r.stats.sim_end_s, 5.0);
  std::uint64_t up = 0, down = 0;
  for (const auto& rec : r.records) {
    up += rec.bytes_up;
    down += rec.bytes_down;
  }
  EXPECT_EQ(up, down);
}

TEST(Swarm, ExplicitPopulationMustBeDense) {
  const auto cfg = bench_config(4);
  auto nodes = bench_population(cfg);
  nodes.back().id += 7;
  EXPECT_THROW(Swarm(cfg, nodes), std::invalid_argument);
}

TEST(Presets, EveryPresetValidates) {
  for (const auto& name : preset_names()) {
    const auto p = make_preset(name, Scale::kDesk);
    EXPECT_FALSE(p.points.empty()) << name;
    for (const auto& pt : p.points) EXPECT_NO_THROW(pt.config.validate()) << pt.label();
  }
  EXPECT_THROW(make_preset("nope", Scale::kDesk), UnknownPreset);
  EXPECT_THROW(parse_scale("huge"), std::invalid_argument);
}

}  // namespace
}  // namespace swarmsim
