#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "swarmsim/protocol/torrent.hpp"
#include "swarmsim/strategy/tyrant.hpp"

namespace swarmsim {

enum class Role : std::uint8_t { kAltruistic = 0, kStandard = 1, kLeech = 2, kInitialSeed = 3 };
inline constexpr std::size_t kPopulationCount = 3;

std::string_view to_string(Role role);

enum class TradingKind : std::uint8_t { kTft, kTyrant };
enum class SeedingKind : std::uint8_t { kRoundRobin, kRewardLottery };

std::string_view to_string(TradingKind kind);
std::string_view to_string(SeedingKind kind);

struct PopulationConfig {
  double fraction = 0.0;
  TradingKind trading = TradingKind::kTft;
  SeedingKind seeding = SeedingKind::kRoundRobin;
  double seed_min_s = 0.0;  // seeding duration bounds before compression
  double seed_max_s = 0.0;

  bool operator==(const PopulationConfig&) const = default;
};

struct RewardConfig {
  double reservation = 0.75;
  double overlap = 1.0;
  bool ignore_tyrants = false;
  bool synthetic_history = true;
  bool in_run_observation = true;
  std::uint64_t history_min_bytes = kMiB;
  std::uint64_t history_max_bytes = 10 * kGiB;
  double ticket_normalization = 1048576.0;

  bool operator==(const RewardConfig&) const = default;
};

struct ProtocolConfig {
  std::size_t active_set = 4;
  std::size_t optimistic_slots = 1;
  bool scale_active_set = false;
  double choke_interval_s = 10.0;
  double optimistic_interval_s = 30.0;
  double rate_window_s = 20.0;
  std::size_t pipeline_depth = 5;
  double request_timeout_s = 60.0;
  std::size_t neighbor_request = 50;
  std::size_t min_neighbors = 20;
  double reannounce_interval_s = 1800.0;

  bool operator==(const ProtocolConfig&) const = default;
};

struct ScenarioConfig {
  std::string run_id = "run";
  std::uint64_t seed = 1;
  double horizon_s = 0.0;  // 0: run until every node has finished

  TorrentSpec torrent;

  std::size_t node_count = 200;
  double time_compression = 0.1;
  std::vector<double> bandwidth_classes = {128e3, 256e3, 512e3, 1e6, 2e6, 5e6};
  double upload_ratio = 0.5;
  // Symmetric links: download = upload instead of upload = ratio * download.
  bool symmetric = false;

  std::size_t initial_seeds = 1;
  double initial_seed_upload_bps = 5e6;

  std::string trace_file;  // empty: synthetic flash crowd
  double trace_peak_rate = 0.006;
  double trace_decay_s = 100000.0;

  std::array<PopulationConfig, kPopulationCount> populations{{
      {0.10, TradingKind::kTft, SeedingKind::kRoundRobin, 86400.0, 172800.0},
      {0.70, TradingKind::kTft, SeedingKind::kRoundRobin, 3600.0, 7200.0},
      {0.20, TradingKind::kTft, SeedingKind::kRoundRobin, 0.0, 0.0},
  }};

  std::size_t seeding_slots = 8;
  double seeding_round_s = 30.0;
  RewardConfig reward;
  TyrantParams tyrant;
  ProtocolConfig protocol;
  double legacy_fraction = 0.0;

  PopulationConfig& population(Role role) { return populations.at(static_cast<std::size_t>(role)); }
  const PopulationConfig& population(Role role) const {
    return populations.at(static_cast<std::size_t>(role));
  }

  // Throws ConfigError naming the offending key.
  void validate() const;

  bool operator==(const ScenarioConfig&) const;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message, std::size_t line = 0);
  const std::string& key() const { return key_; }
  std::size_t line() const { return line_; }

 private:
  std::string key_;
  std::size_t line_;
};

// `key = value` lines, '#' comments. Keys not present keep their defaults.
ScenarioConfig parse_config(std::istream& in);
ScenarioConfig parse_config_string(std::string_view text);
ScenarioConfig load_config(const std::string& path);

// Applies a single `key = value` assignment.
void set_config_value(ScenarioConfig& cfg, std::string_view key, std::string_view value);

// Every key, in schema order. parse_config(serialize_config(c)) == c.
std::string serialize_config(const ScenarioConfig& cfg);

// Schema keys with a one-line description, for --help and the README.
std::vector<std::pair<std::string, std::string>> config_schema();

}  // namespace swarmsim
