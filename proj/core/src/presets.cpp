#include "swarmsim/experiment/presets.hpp"

#include <functional>

#include "swarmsim/engine/format.hpp"

namespace swarmsim {
namespace {

using Mutator = std::function<void(ScenarioConfig&)>;

PopulationConfig& alt(ScenarioConfig& c) { return c.population(Role::kAltruistic); }
PopulationConfig& stdp(ScenarioConfig& c) { return c.population(Role::kStandard); }
PopulationConfig& leech(ScenarioConfig& c) { return c.population(Role::kLeech); }

void set_fractions(ScenarioConfig& c, double a, double s, double l) {
  alt(c).fraction = a;
  stdp(c).fraction = s;
  leech(c).fraction = l;
}

void reward_altruists(ScenarioConfig& c, double reservation) {
  alt(c).seeding = SeedingKind::kRewardLottery;
  c.reward.reservation = reservation;
}

void tyrant_leeches(ScenarioConfig& c) { leech(c).trading = TradingKind::kTyrant; }

SweepPoint point(const ScenarioConfig& base,
                 std::vector<std::pair<std::string, std::string>> keys, const Mutator& m) {
  SweepPoint p{std::move(keys), base};
  m(p.config);
  p.config.run_id = p.label();
  return p;
}

const std::vector<double> kReservations = {0.0, 0.25, 0.5, 0.75, 1.0};
const std::vector<double> kOverlaps = {0.0, 0.25, 0.5, 0.75, 1.0};
const std::vector<double> kAltruistFractions = {0.05, 0.1, 0.2, 0.3};

}  // namespace

Scale parse_scale(std::string_view name) {
  if (name == "desk") return Scale::kDesk;
  if (name == "paper") return Scale::kPaper;
  throw std::invalid_argument("unknown scale '" + std::string(name) + "' (desk|paper)");
}

ScenarioConfig base_config(Scale scale) {
  ScenarioConfig c;
  if (scale == Scale::kDesk) {
    c.node_count = 200;
    c.torrent.total_bytes = 64 * kMiB;
    c.time_compression = 0.1;
  } else {
    c.node_count = 2000;
    c.torrent.total_bytes = kGiB;
    c.time_compression = 1.0;
    c.trace_peak_rate = 0.06;
  }
  return c;
}

std::string SweepPoint::label() const {
  std::string out;
  for (const auto& [k, v] : keys) {
    if (!out.empty()) out += ',';
    out += k + '=' + v;
  }
  return out.empty() ? "default" : out;
}

std::vector<std::string> preset_names() {
  return {"seeding-importance", "baseline-reward", "reservation-sweep", "altruist-size-sweep",
          "overlap-sweep",      "tyrant-vs-reward", "tyrant-collapse",  "ignore-tyrants"};
}

ExperimentPreset make_preset(std::string_view name, Scale scale) {
  const ScenarioConfig base = base_config(scale);
  ExperimentPreset p;
  p.name = std::string(name);

  if (name == "seeding-importance") {
    // One initial seed only, then short seeders, then long seeders.
    p.description = "median efficiency for three population mixes";
    p.points.push_back(point(base, {{"mix", "leech-only"}},
                             [](ScenarioConfig& c) { set_fractions(c, 0, 0, 1); }));
    p.points.push_back(point(base, {{"mix", "standard-70"}},
                             [](ScenarioConfig& c) { set_fractions(c, 0, 0.7, 0.3); }));
    p.points.push_back(point(base, {{"mix", "altruist-10"}},
                             [](ScenarioConfig& c) { set_fractions(c, 0.1, 0.7, 0.2); }));
  } else if (name == "baseline-reward") {
    p.description = "altruists seeding normally versus reward seeding at 75% reservation";
    p.points.push_back(point(base, {{"altruist_seeding", "round-robin"}}, [](ScenarioConfig&) {}));
    p.points.push_back(point(base, {{"altruist_seeding", "reward-lottery"}},
                             [](ScenarioConfig& c) { reward_altruists(c, 0.75); }));
  } else if (name == "reservation-sweep") {
    p.description = "population medians versus reserved seeding bandwidth";
    for (double rho : kReservations) {
      p.points.push_back(point(base, {{"reservation", format_real(rho)}},
                               [rho](ScenarioConfig& c) { reward_altruists(c, rho); }));
    }
  } else if (name == "altruist-size-sweep") {
    // Leeches fixed at 20%, standard takes the rest.
    p.description = "population medians versus altruist share, TFT and tyrant leeches";
    for (const char* leeches : {"tft", "tyrant"}) {
      for (double a : kAltruistFractions) {
        p.points.push_back(point(base, {{"leech_trading", leeches}, {"altruist_fraction", format_real(a)}},
                                 [a, leeches](ScenarioConfig& c) {
                                   set_fractions(c, a, 0.8 - a, 0.2);
                                   reward_altruists(c, 0.75);
                                   if (std::string_view(leeches) == "tyrant") tyrant_leeches(c);
                                 }));
      }
    }
  } else if (name == "overlap-sweep") {
    // Reservation held at 75%.
    p.description = "population medians versus rewarding overlap among altruists";
    for (double w : kOverlaps) {
      p.points.push_back(point(base, {{"overlap", format_real(w)}}, [w](ScenarioConfig& c) {
        reward_altruists(c, 0.75);
        c.reward.overlap = w;
      }));
    }
  } else if (name == "tyrant-vs-reward") {
    // Altruists trading with TFT or as tyrants.
    p.description = "reservation sweep against tyrant leeches";
    for (const char* trading : {"tft", "tyrant"}) {
      for (double rho : kReservations) {
        p.points.push_back(point(base, {{"altruist_trading", trading}, {"reservation", format_real(rho)}},
                                 [rho, trading](ScenarioConfig& c) {
                                   reward_altruists(c, rho);
                                   tyrant_leeches(c);
                                   if (std::string_view(trading) == "tyrant") {
                                     alt(c).trading = TradingKind::kTyrant;
                                   }
                                 }));
      }
    }
  } else if (name == "tyrant-collapse") {
    // Tyrant leeches with and without mutual recognition.
    p.description = "tyrant leeches with self-identification on and off";
    for (bool self_id : {true, false}) {
      p.points.push_back(point(base, {{"self_identify", self_id ? "true" : "false"}},
                               [self_id](ScenarioConfig& c) {
                                 reward_altruists(c, 0.75);
                                 tyrant_leeches(c);
                                 c.tyrant.self_identify = self_id;
                               }));
    }
  } else if (name == "ignore-tyrants") {
    // Reward seeders refuse to seed to self-identified tyrants.
    p.description = "reward seeders ignoring tyrant leeches while seeding";
    for (bool ignore : {false, true}) {
      p.points.push_back(point(base, {{"ignore_tyrants", ignore ? "true" : "false"}},
                               [ignore](ScenarioConfig& c) {
                                 reward_altruists(c, 0.75);
                                 tyrant_leeches(c);
                                 c.reward.ignore_tyrants = ignore;
                               }));
    }
  } else {
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw UnknownPreset("unknown preset '" + std::string(name) + "' (known: " + known + ")");
  }
  return p;
}

ScenarioConfig bench_config(std::size_t nodes) {
  ScenarioConfig c;
  c.run_id = "bench-" + std::to_string(nodes);
  c.node_count = nodes;
  c.torrent.total_bytes = 100'000'000;
  c.time_compression = 1.0;
  c.bandwidth_classes = {56e3};
  c.symmetric = true;
  c.initial_seed_upload_bps = 512e3;
  set_fractions(c, 0, 0, 1);
  return c;
}

std::vector<NodeSpec> bench_population(const ScenarioConfig& cfg) {
  const std::vector<double> joins(cfg.node_count, 0.0);
  return build_population(cfg, joins);
}

}  // namespace swarmsim
