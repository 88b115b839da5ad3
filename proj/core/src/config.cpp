#include "swarmsim/scenario/config.hpp"

#include "swarmsim/engine/format.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>

namespace swarmsim {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::kAltruistic: return "altruistic";
    case Role::kStandard: return "standard";
    case Role::kLeech: return "leech";
    case Role::kInitialSeed: return "initial_seed";
  }
  return "unknown";
}

std::string_view to_string(TradingKind kind) {
  return kind == TradingKind::kTyrant ? "tyrant" : "tft";
}

std::string_view to_string(SeedingKind kind) {
  return kind == SeedingKind::kRewardLottery ? "reward-lottery" : "round-robin";
}

ConfigError::ConfigError(std::string key, const std::string& message, std::size_t line)
    : std::runtime_error((line ? "line " + std::to_string(line) + ": " : std::string()) +
                         key + ": " + message),
      key_(std::move(key)),
      line_(line) {}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(std::string_view key, std::string_view text) {
  text = trim(text);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw ConfigError(std::string(key), "expected a number, got '" + std::string(text) + "'");
  }
  return v;
}

std::uint64_t to_uint(std::string_view key, std::string_view text) {
  text = trim(text);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(std::string(key),
                      "expected a non-negative integer, got '" + std::string(text) + "'");
  }
  return v;
}

bool to_bool(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(std::string(key), "expected true or false, got '" + std::string(text) + "'");
}

TradingKind to_trading(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text == "tft") return TradingKind::kTft;
  if (text == "tyrant") return TradingKind::kTyrant;
  throw ConfigError(std::string(key), "expected tft or tyrant, got '" + std::string(text) + "'");
}

SeedingKind to_seeding(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text == "round-robin") return SeedingKind::kRoundRobin;
  if (text == "reward-lottery") return SeedingKind::kRewardLottery;
  throw ConfigError(std::string(key),
                    "expected round-robin or reward-lottery, got '" + std::string(text) + "'");
}

std::vector<double> to_list(std::string_view key, std::string_view text) {
  std::vector<double> out;
  text = trim(text);
  while (!text.empty()) {
    const auto comma = text.find(',');
    out.push_back(to_double(key, text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text = text.substr(comma + 1);
  }
  return out;
}

struct Field {
  std::string key;
  std::string help;
  std::function<void(ScenarioConfig&, std::string_view, std::string_view)> set;
  std::function<std::string(const ScenarioConfig&)> get;
};

template <typename T>
Field num(std::string key, std::string help, T ScenarioConfig::*member) {
  return {std::move(key), std::move(help),
          [member](ScenarioConfig& c, std::string_view k, std::string_view v) {
            if constexpr (std::is_floating_point_v<T>) {
              c.*member = to_double(k, v);
            } else if constexpr (std::is_same_v<T, bool>) {
              c.*member = to_bool(k, v);
            } else {
              c.*member = static_cast<T>(to_uint(k, v));
            }
          },
          [member](const ScenarioConfig& c) {
            if constexpr (std::is_floating_point_v<T>) {
              return format_real(c.*member);
            } else if constexpr (std::is_same_v<T, bool>) {
              return std::string(c.*member ? "true" : "false");
            } else {
              return std::to_string(c.*member);
            }
          }};
}

// Same as `num` but for a member of a nested struct.
template <typename S, typename T>
Field nested(std::string key, std::string help, S ScenarioConfig::*outer, T S::*member) {
  return {std::move(key), std::move(help),
          [outer, member](ScenarioConfig& c, std::string_view k, std::string_view v) {
            auto& field = c.*outer.*member;
            if constexpr (std::is_floating_point_v<T>) {
              field = to_double(k, v);
            } else if constexpr (std::is_same_v<T, bool>) {
              field = to_bool(k, v);
            } else {
              field = static_cast<T>(to_uint(k, v));
            }
          },
          [outer, member](const ScenarioConfig& c) {
            const auto& field = c.*outer.*member;
            if constexpr (std::is_floating_point_v<T>) {
              return format_real(field);
            } else if constexpr (std::is_same_v<T, bool>) {
              return std::string(field ? "true" : "false");
            } else {
              return std::to_string(field);
            }
          }};
}

std::vector<Field> build_fields() {
  std::vector<Field> f;
  f.push_back({"run.id", "run identifier, used as the output file prefix",
               [](ScenarioConfig& c, std::string_view k, std::string_view v) {
                 v = trim(v);
                 if (v.empty() || v.find_first_of("/\\ \t") != std::string_view::npos) {
                   throw ConfigError(std::string(k), "must be a non-empty name without spaces or slashes");
                 }
                 c.run_id = std::string(v);
               },
               [](const ScenarioConfig& c) { return c.run_id; }});
  f.push_back(num("run.seed", "root RNG seed", &ScenarioConfig::seed));
  f.push_back(num("run.horizon", "simulated seconds to stop at; 0 runs to completion",
                  &ScenarioConfig::horizon_s));
  f.push_back({"torrent.file_bytes", "object size in bytes",
               [](ScenarioConfig& c, std::string_view k, std::string_view v) {
                 c.torrent.total_bytes = to_uint(k, v);
               },
               [](const ScenarioConfig& c) { return std::to_string(c.torrent.total_bytes); }});
  f.push_back({"torrent.piece_bytes", "piece size in bytes",
               [](ScenarioConfig& c, std::string_view k, std::string_view v) {
                 c.torrent.piece_bytes = static_cast<std::uint32_t>(to_uint(k, v));
               },
               [](const ScenarioConfig& c) { return std::to_string(c.torrent.piece_bytes); }});
  f.push_back({"torrent.block_bytes", "block size in bytes",
               [](ScenarioConfig& c, std::string_view k, std::string_view v) {
                 c.torrent.block_bytes = static_cast<std::uint32_t>(to_uint(k, v));
               },
               [](const ScenarioConfig& c) { return std::to_string(c.torrent.block_bytes); }});
  f.push_back(num("swarm.node_count", "number of downloading peers", &ScenarioConfig::node_count));
  f.push_back(num("swarm.time_compression",
                  "factor applied to join times and seeding durations",
                  &ScenarioConfig::time_compression));
  f.push_back({"swarm.bandwidth_classes", "comma-separated download capacities, bits/s",
               [](ScenarioConfig& c, std::string_view k, std::string_view v) {
                 c.bandwidth_classes = to_list(k, v);
               },
               [](const ScenarioConfig& c) {
                 std::string out;
                 for (std::size_t i = 0; i < c.bandwidth_classes.size(); ++i) {
                   if (i) out += ", ";
                   out += format_real(c.bandwidth_classes[i]);
                 }
                 return out;
               }});
  f.push_back(num("swarm.upload_ratio", "upload capacity as a fraction of download",
                  &ScenarioConfig::upload_ratio));
  f.push_back(num("swarm.symmetric", "upload equals download (overrides upload_ratio)",
                  &ScenarioConfig::symmetric));
  f.push_back(num("initial_seed.count", "seeds present at t = 0", &ScenarioConfig::initial_seeds));
  f.push_back(num("initial_seed.upload_bps", "upload capacity of each initial seed",
                  &ScenarioConfig::initial_seed_upload_bps));
  f.push_back({"trace.file", "join-time trace; empty selects the synthetic flash crowd",
               [](ScenarioConfig& c, std::string_view, std::string_view v) {
                 c.trace_file = std::string(trim(v));
               },
               [](const ScenarioConfig& c) { return c.trace_file; }});
  f.push_back(num("trace.peak_rate", "flash-crowd arrival rate at t = 0, joins/s (uncompressed)",
                  &ScenarioConfig::trace_peak_rate));
  f.push_back(num("trace.decay", "flash-crowd decay constant, seconds (uncompressed)",
                  &ScenarioConfig::trace_decay_s));

  for (Role role : {Role::kAltruistic, Role::kStandard, Role::kLeech}) {
    const auto idx = static_cast<std::size_t>(role);
    const std::string prefix = "populations." + std::string(to_string(role)) + ".";
    f.push_back({prefix + "fraction", "share of node_count",
                 [idx](ScenarioConfig& c, std::string_view k, std::string_view v) {
                   c.populations[idx].fraction = to_double(k, v);
                 },
                 [idx](const ScenarioConfig& c) { return format_real(c.populations[idx].fraction); }});
    f.push_back({prefix + "trading", "tft | tyrant",
                 [idx](ScenarioConfig& c, std::string_view k, std::string_view v) {
                   c.populations[idx].trading = to_trading(k, v);
                 },
                 [idx](const ScenarioConfig& c) {
                   return std::string(to_string(c.populations[idx].trading));
                 }});
    f.push_back({prefix + "seeding", "round-robin | reward-lottery",
                 [idx](ScenarioConfig& c, std::string_view k, std::string_view v) {
                   c.populations[idx].seeding = to_seeding(k, v);
                 },
                 [idx](const ScenarioConfig& c) {
                   return std::string(to_string(c.populations[idx].seeding));
                 }});
    f.push_back({prefix + "seed_min", "minimum seeding time, seconds (uncompressed)",
                 [idx](ScenarioConfig& c, std::string_view k, std::string_view v) {
                   c.populations[idx].seed_min_s = to_double(k, v);
                 },
                 [idx](const ScenarioConfig& c) { return format_real(c.populations[idx].seed_min_s); }});
    f.push_back({prefix + "seed_max", "maximum seeding time, seconds (uncompressed)",
                 [idx](ScenarioConfig& c, std::string_view k, std::string_view v) {
                   c.populations[idx].seed_max_s = to_double(k, v);
                 },
                 [idx](const ScenarioConfig& c) { return format_real(c.populations[idx].seed_max_s); }});
  }

  f.push_back(num("seeding.slots", "simultaneous unchokes while seeding", &ScenarioConfig::seeding_slots));
  f.push_back(num("seeding.round_period", "seeding rotation period, seconds",
                  &ScenarioConfig::seeding_round_s));

  using R = RewardConfig;
  f.push_back(nested("reward.reservation", "share of seeding slots reserved for known seeders",
                     &ScenarioConfig::reward, &R::reservation));
  f.push_back(nested("reward.overlap", "share of altruists holding history of the others",
                     &ScenarioConfig::reward, &R::overlap));
  f.push_back(nested("reward.ignore_tyrants", "reward seeders refuse recognized tyrants",
                     &ScenarioConfig::reward, &R::ignore_tyrants));
  f.push_back(nested("reward.synthetic_history", "seed rewarding altruists with invented history",
                     &ScenarioConfig::reward, &R::synthetic_history));
  f.push_back(nested("reward.in_run_observation", "ledger seeded bytes observed during the run",
                     &ScenarioConfig::reward, &R::in_run_observation));
  f.push_back(nested("reward.history_min_bytes", "lower bound of invented history",
                     &ScenarioConfig::reward, &R::history_min_bytes));
  f.push_back(nested("reward.history_max_bytes", "upper bound of invented history",
                     &ScenarioConfig::reward, &R::history_max_bytes));
  f.push_back(nested("reward.ticket_normalization", "bytes per doubling of extra tickets",
                     &ScenarioConfig::reward, &R::ticket_normalization));

  using T = TyrantParams;
  f.push_back(nested("tyrant.gamma", "offer decay after a reciprocation streak",
                     &ScenarioConfig::tyrant, &T::gamma));
  f.push_back(nested("tyrant.delta", "offer growth after an unreciprocated round",
                     &ScenarioConfig::tyrant, &T::delta));
  f.push_back({"tyrant.streak", "reciprocated rounds before decaying",
               [](ScenarioConfig& c, std::string_view k, std::string_view v) {
                 c.tyrant.streak = static_cast<int>(to_uint(k, v));
               },
               [](const ScenarioConfig& c) { return std::to_string(c.tyrant.streak); }});
  f.push_back(nested("tyrant.self_identify", "advertise and recognize tyrant peers",
                     &ScenarioConfig::tyrant, &T::self_identify));
  f.push_back(nested("tyrant.min_rate", "floor for per-peer offers, bits/s",
                     &ScenarioConfig::tyrant, &T::min_rate_bps));

  using P = ProtocolConfig;
  f.push_back(nested("protocol.active_set", "unchoke slots including optimistic",
                     &ScenarioConfig::protocol, &P::active_set));
  f.push_back(nested("protocol.optimistic_slots", "optimistic unchoke slots",
                     &ScenarioConfig::protocol, &P::optimistic_slots));
  f.push_back(nested("protocol.scale_active_set", "grow the active set with upload capacity",
                     &ScenarioConfig::protocol, &P::scale_active_set));
  f.push_back(nested("protocol.choke_interval", "seconds between choke rounds",
                     &ScenarioConfig::protocol, &P::choke_interval_s));
  f.push_back(nested("protocol.optimistic_interval", "seconds between optimistic rotations",
                     &ScenarioConfig::protocol, &P::optimistic_interval_s));
  f.push_back(nested("protocol.rate_window", "rolling rate window, seconds",
                     &ScenarioConfig::protocol, &P::rate_window_s));
  f.push_back(nested("protocol.pipeline_depth", "outstanding block requests per peer",
                     &ScenarioConfig::protocol, &P::pipeline_depth));
  f.push_back(nested("protocol.request_timeout", "seconds before a request is reissued",
                     &ScenarioConfig::protocol, &P::request_timeout_s));
  f.push_back(nested("protocol.neighbor_request", "peers requested per tracker announce",
                     &ScenarioConfig::protocol, &P::neighbor_request));
  f.push_back(nested("protocol.min_neighbors", "re-announce early below this many neighbors",
                     &ScenarioConfig::protocol, &P::min_neighbors));
  f.push_back(nested("protocol.reannounce_interval", "seconds between periodic announces",
                     &ScenarioConfig::protocol, &P::reannounce_interval_s));
  f.push_back(num("identity.legacy_fraction", "share of peers without a long-term id",
                  &ScenarioConfig::legacy_fraction));
  return f;
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = build_fields();
  return table;
}

void require(bool ok, const char* key, const std::string& message) {
  if (!ok) throw ConfigError(key, message);
}

bool unit_interval(double v) { return v >= 0.0 && v <= 1.0; }

}  // namespace

void ScenarioConfig::validate() const {
  require(node_count >= 2, "swarm.node_count", "must be at least 2");
  try {
    torrent.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("torrent.piece_bytes", e.what());
  }
  double sum = 0.0;
  for (const auto& p : populations) {
    require(p.fraction >= 0.0, "populations.*.fraction", "must be non-negative");
    require(p.seed_min_s >= 0.0 && p.seed_min_s <= p.seed_max_s, "populations.*.seed_min",
            "must satisfy 0 <= seed_min <= seed_max");
    sum += p.fraction;
  }
  char got[32];
  std::snprintf(got, sizeof got, "%.6g", sum);
  require(std::fabs(sum - 1.0) <= 1e-9, "populations.*.fraction",
          "fractions must sum to 1 (got " + std::string(got) + ")");
  require(time_compression > 0.0, "swarm.time_compression", "must be positive");
  require(!bandwidth_classes.empty(), "swarm.bandwidth_classes", "must not be empty");
  for (double b : bandwidth_classes) {
    require(b > 0.0, "swarm.bandwidth_classes", "capacities must be positive");
  }
  require(upload_ratio > 0.0, "swarm.upload_ratio", "must be positive");
  require(initial_seeds >= 1, "initial_seed.count", "at least one initial seed is required");
  require(initial_seed_upload_bps > 0.0, "initial_seed.upload_bps", "must be positive");
  require(trace_peak_rate > 0.0, "trace.peak_rate", "must be positive");
  require(trace_decay_s > 0.0, "trace.decay", "must be positive");
  require(horizon_s >= 0.0, "run.horizon", "must be non-negative");
  require(seeding_slots >= 1, "seeding.slots", "must be at least 1");
  require(seeding_round_s > 0.0, "seeding.round_period", "must be positive");
  require(unit_interval(reward.reservation), "reward.reservation", "must lie in [0, 1]");
  require(unit_interval(reward.overlap), "reward.overlap", "must lie in [0, 1]");
  require(reward.history_min_bytes >= 1 && reward.history_min_bytes <= reward.history_max_bytes,
          "reward.history_min_bytes", "must satisfy 1 <= min <= max");
  require(reward.ticket_normalization > 0.0, "reward.ticket_normalization", "must be positive");
  require(tyrant.gamma > 0.0 && tyrant.gamma <= 1.0, "tyrant.gamma", "must lie in (0, 1]");
  require(tyrant.delta >= 1.0, "tyrant.delta", "must be at least 1");
  require(tyrant.streak >= 1, "tyrant.streak", "must be at least 1");
  require(tyrant.min_rate_bps > 0.0, "tyrant.min_rate", "must be positive");
  require(protocol.active_set >= 1, "protocol.active_set", "must be at least 1");
  require(protocol.optimistic_slots <= 1, "protocol.optimistic_slots", "must be 0 or 1");
  require(protocol.optimistic_slots < protocol.active_set, "protocol.optimistic_slots",
          "must leave at least one regular slot");
  require(protocol.choke_interval_s > 0.0, "protocol.choke_interval", "must be positive");
  require(protocol.optimistic_interval_s > 0.0, "protocol.optimistic_interval", "must be positive");
  require(protocol.rate_window_s > 0.0, "protocol.rate_window", "must be positive");
  require(protocol.pipeline_depth >= 1, "protocol.pipeline_depth", "must be at least 1");
  require(protocol.request_timeout_s > 0.0, "protocol.request_timeout", "must be positive");
  require(protocol.neighbor_request >= 1, "protocol.neighbor_request", "must be at least 1");
  require(protocol.reannounce_interval_s > 0.0, "protocol.reannounce_interval", "must be positive");
  require(unit_interval(legacy_fraction), "identity.legacy_fraction", "must lie in [0, 1]");
}

bool ScenarioConfig::operator==(const ScenarioConfig& o) const {
  return serialize_config(*this) == serialize_config(o);
}

void set_config_value(ScenarioConfig& cfg, std::string_view key, std::string_view value) {
  for (const auto& f : fields()) {
    if (f.key == key) {
      f.set(cfg, key, value);
      return;
    }
  }
  throw ConfigError(std::string(key), "unknown key");
}

ScenarioConfig parse_config(std::istream& in) {
  ScenarioConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = line;
    if (const auto hash = text.find('#'); hash != std::string_view::npos) {
      text = text.substr(0, hash);
    }
    text = trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(std::string(text), "expected 'key = value'", line_no);
    }
    const auto key = trim(text.substr(0, eq));
    try {
      set_config_value(cfg, key, text.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(e.key(), std::string(e.what()).substr(e.key().size() + 2), line_no);
    }
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig parse_config_string(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_config(in);
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
  return parse_config(in);
}

std::string serialize_config(const ScenarioConfig& cfg) {
  std::string out;
  for (const auto& f : fields()) {
    out += f.key;
    out += " = ";
    out += f.get(cfg);
    out += '\n';
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> config_schema() {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : fields()) out.emplace_back(f.key, f.help);
  return out;
}

}  // namespace swarmsim
