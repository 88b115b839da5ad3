// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Swarm criteria run the desk presets over seeds 1..5 and
// compare the mean over seeds of per-run population medians unless the
// criterion is stated per seed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "support/maxmin_oracle.hpp"
#include "swarmsim/engine/flow_allocator.hpp"
#include "swarmsim/experiment/presets.hpp"
#include "swarmsim/experiment/sweep.hpp"
#include "swarmsim/strategy/tyrant.hpp"
#include "swarmsim/swarm/swarm.hpp"

namespace fs = std::filesystem;
using namespace swarmsim;
using Clock = std::chrono::steady_clock;

namespace {

const std::vector<std::uint64_t> kSeeds = {1, 2, 3, 4, 5};

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("criterion %2d %-28s %s  %s\n", id, name, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// Identical configurations reached from different presets run once.
class Runs {
 public:
  std::size_t add(const SweepPoint& p) {
    ScenarioConfig c = p.config;
    c.run_id.clear();
    const auto key = serialize_config(c);
    auto it = index_.find(key);
    if (it != index_.end()) return it->second;
    index_[key] = points_.size();
    points_.push_back(p);
    return points_.size() - 1;
  }

  void run() {
    SweepOptions opts;
    opts.seeds = kSeeds;
    opts.jobs = std::max(1u, std::thread::hardware_concurrency());
    opts.on_done = [this](const std::string& id, const RunStats& s) {
      std::lock_guard lock(mu_);
      max_wall_ = std::max(max_wall_, s.wall_s);
      std::fprintf(stderr, "  %s: %.1f s\n", id.c_str(), s.wall_s);
    };
    std::fprintf(stderr, "running %zu points x %zu seeds\n", points_.size(), kSeeds.size());
    outcomes_ = run_sweep(points_, opts, true);
  }

  // Per-seed median efficiency of `role` at point `p`, in seed order.
  std::vector<double> medians(std::size_t p, const std::string& role) const {
    std::vector<double> out;
    for (const auto& o : outcomes_) {
      if (o.point != p) continue;
      for (const auto& r : o.summary) {
        if (r.role == role && r.metric == "median_efficiency") out.push_back(r.value);
      }
    }
    return out;
  }
  double mean_median(std::size_t p, const std::string& role) const {
    const auto v = medians(p, role);
    double s = 0;
    for (double x : v) s += x;
    return v.empty() ? std::nan("") : s / static_cast<double>(v.size());
  }

  const std::vector<SweepPoint>& points() const { return points_; }
  const std::vector<SweepOutcome>& outcomes() const { return outcomes_; }
  double max_wall() const { return max_wall_; }

 private:
  std::map<std::string, std::size_t> index_;
  std::vector<SweepPoint> points_;
  std::vector<SweepOutcome> outcomes_;
  std::mutex mu_;
  double max_wall_ = 0.0;
};

std::size_t find_point(Runs& runs, const ExperimentPreset& preset,
                       const std::vector<std::pair<std::string, std::string>>& keys) {
  for (const auto& p : preset.points) {
    if (p.keys == keys) return runs.add(p);
  }
  throw std::logic_error("preset " + preset.name + " has no point " +
                         SweepPoint{keys, {}}.label());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void tyrant_collapse() {
  const auto t0 = Clock::now();
  TyrantParams off;
  off.self_identify = false;
  TyrantParams on;
  const double up = 400e3, down = 800e3;
  const auto a = simulate_tyrant_pair(up, down, up, down, 4, 30, off);
  const auto b = simulate_tyrant_pair(up, down, up, down, 4, 30, on);
  const double initial = std::min(a.a_to_b_bps.front(), a.b_to_a_bps.front());
  double lowest = initial;
  for (std::size_t r = 0; r < a.a_to_b_bps.size(); ++r) {
    lowest = std::min({lowest, a.a_to_b_bps[r], a.b_to_a_bps[r]});
  }
  const double bound = std::min(up, down);
  const double reached = std::min(b.a_to_b_bps.back(), b.b_to_a_bps.back());
  const double wall = seconds_since(t0);
  report(7, "mutual-tyrant collapse", lowest < 0.05 * initial && reached >= 0.8 * bound && wall < 1,
         fmt("self-id off: min rate %.1f%% of initial (need <5%%); on: %.1f%% of bound "
             "(need >=80%%); %.3f s",
             100 * lowest / initial, 100 * reached / bound, wall));
}

void determinism_conservation(const Runs& runs) {
  const auto t0 = Clock::now();
  std::string problem;

  // Conservation and efficiency range over every swarm run in the suite.
  std::size_t checked = 0;
  for (const auto& o : runs.outcomes()) {
    const auto& cfg = runs.points()[o.point].config;
    std::uint64_t up = 0, down = 0;
    for (const auto& r : o.records) {
      up += r.bytes_up;
      down += r.bytes_down;
      if (r.role == Role::kInitialSeed) continue;
      const auto e = efficiency(r, cfg.torrent.total_bits());
      if (e && !(*e > 0.0 && *e <= 1.0 + 1e-9) && problem.empty()) {
        problem = o.run_id + ": efficiency " + std::to_string(*e);
      }
    }
    if (up != down && problem.empty()) problem = o.run_id + ": uploaded != downloaded";
    ++checked;
  }

  // Byte-identical reports for a repeated seed.
  ScenarioConfig cfg = base_config(Scale::kDesk);
  cfg.run_id = "determinism";
  const fs::path dir = fs::temp_directory_path() / "swarmsim_acceptance";
  fs::remove_all(dir);
  const auto a = write_run_report(dir / "a", cfg, Swarm(cfg).run());
  const auto b = write_run_report(dir / "b", cfg, Swarm(cfg).run());
  for (auto m : {&ReportPaths::summary, &ReportPaths::nodes, &ReportPaths::efficiency_cdf,
                 &ReportPaths::membership, &ReportPaths::manifest}) {
    if (slurp(a.*m) != slurp(b.*m) && problem.empty()) {
      problem = "report differs: " + (a.*m).filename().string();
    }
  }
  fs::remove_all(dir);

  // Brute-force max-min check on small fixtures.
  std::size_t fixtures = 0;
  FlowAllocator alloc;
  auto check = [&](const testing::Fixture& f) {
    const auto& got = alloc.allocate(f.edges, f.nodes, f.pools);
    const auto v = testing::max_min_violation(f, got.rates);
    if (!v.empty() && problem.empty()) problem = "max-min fixture " + std::to_string(fixtures) + ": " + v;
    ++fixtures;
  };
  for (const auto& f : testing::three_node_fixtures()) check(f);
  Rng rng = make_stream(2024, StreamTag::kFixture);
  for (int i = 0; i < 5000; ++i) check(testing::random_fixture(rng, 1 + uniform_index(rng, 6)));

  const double wall = seconds_since(t0);
  report(9, "determinism & conservation", problem.empty() && wall < 30,
         (problem.empty() ? std::string("ok") : problem) + "; " + std::to_string(checked) +
             " runs, " + std::to_string(fixtures) + " fixtures, " + fmt("%.1f s", wall));
}

void scaling() {
  std::vector<double> events;
  for (std::size_t n : {10, 100}) {
    const auto cfg = bench_config(n);
    events.push_back(static_cast<double>(Swarm(cfg, bench_population(cfg)).run().stats.events));
  }
  const double ratio = events[1] / events[0];
  report(10, "scaling", ratio >= 6.0 && ratio <= 14.0,
         fmt("events %.0f -> %.0f, ratio %.2f (need 6..14)", events[0], events[1], ratio));
}

}  // namespace

int main() {
  const auto t_start = Clock::now();
  Runs runs;

  const auto si = make_preset("seeding-importance", Scale::kDesk);
  const auto p_leech = find_point(runs, si, {{"mix", "leech-only"}});
  const auto p_std70 = find_point(runs, si, {{"mix", "standard-70"}});
  const auto p_alt10 = find_point(runs, si, {{"mix", "altruist-10"}});

  const auto br = make_preset("baseline-reward", Scale::kDesk);
  const auto p_reward = find_point(runs, br, {{"altruist_seeding", "reward-lottery"}});

  const auto rs = make_preset("reservation-sweep", Scale::kDesk);
  std::vector<std::size_t> p_rho;
  for (const char* rho : {"0", "0.25", "0.5", "0.75"}) {
    p_rho.push_back(find_point(runs, rs, {{"reservation", rho}}));
  }

  const auto os = make_preset("overlap-sweep", Scale::kDesk);
  std::vector<std::pair<double, std::size_t>> p_omega;
  for (const char* w : {"0", "0.5", "0.75", "1"}) {
    p_omega.emplace_back(std::stod(w), find_point(runs, os, {{"overlap", w}}));
  }

  const auto tv = make_preset("tyrant-vs-reward", Scale::kDesk);
  const auto p_tyr = find_point(runs, tv, {{"altruist_trading", "tft"}, {"reservation", "0.75"}});

  const auto it = make_preset("ignore-tyrants", Scale::kDesk);
  const auto p_ignore = find_point(runs, it, {{"ignore_tyrants", "true"}});

  runs.run();
  const double swarm_wall = seconds_since(t_start);

  // 1
  {
    const double lo = runs.mean_median(p_leech, "all");
    const double mid = runs.mean_median(p_std70, "all");
    const double hi = runs.mean_median(p_alt10, "all");
    const bool pass = lo < mid && mid < hi && lo <= 0.55 && hi >= 0.90 && runs.max_wall() <= 180;
    report(1, "seeding importance", pass,
           fmt("leech-only %.3f (need <=0.55) < std-70 %.3f < alt-10 %.3f (need >=0.90); "
               "slowest run %.1f s",
               lo, mid, hi, runs.max_wall()));
  }

  // 2
  {
    const auto a = runs.medians(p_reward, "altruistic");
    const auto s = runs.medians(p_reward, "standard");
    const auto l = runs.medians(p_reward, "leech");
    int ok = 0;
    std::string per_seed;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const bool good = a[i] - s[i] >= 0.10 && a[i] - l[i] >= 0.10 && a[i] >= 0.90;
      ok += good;
      per_seed += fmt(" [a %.3f s %.3f l %.3f]", a[i], s[i], l[i]);
    }
    report(2, "reward differential", ok >= 4,
           std::to_string(ok) + "/5 seeds with gap >=0.10 and a >=0.90;" + per_seed);
  }

  // 3 and 4
  std::vector<double> gaps;
  for (auto p : p_rho) gaps.push_back(runs.mean_median(p, "altruistic") - runs.mean_median(p, "standard"));
  report(3, "zero-reservation null", std::fabs(gaps[0]) <= 0.05,
         fmt("rho=0 altruistic - standard = %+.3f (need |gap| <=0.05)", gaps[0]));
  {
    bool mono = true;
    for (std::size_t i = 1; i < gaps.size(); ++i) mono &= gaps[i] >= gaps[i - 1] - 0.03;
    report(4, "reservation monotonicity", mono,
           fmt("gaps at rho 0/.25/.5/.75: %+.3f %+.3f %+.3f %+.3f (3-point band)", gaps[0],
               gaps[1], gaps[2], gaps[3]));
  }

  // 5
  {
    bool pass = true;
    std::string detail;
    for (const auto& [w, p] : p_omega) {
      const double gap = runs.mean_median(p, "altruistic") - runs.mean_median(p, "standard");
      pass &= w == 0.0 ? std::fabs(gap) <= 0.05 : gap >= 0.08;
      detail += fmt("w=%.2f %+.3f; ", w, gap);
    }
    report(5, "overlap threshold", pass, detail + "need |gap|<=0.05 at 0, >=0.08 from 0.5");
  }

  // 6
  const double tyr_alt = runs.mean_median(p_tyr, "altruistic");
  const double tyr_leech = runs.mean_median(p_tyr, "leech");
  {
    const double s = runs.mean_median(p_tyr, "standard");
    const bool pass = std::fabs(tyr_leech - tyr_alt) <= 0.05 && s <= std::min(tyr_alt, tyr_leech) - 0.10;
    report(6, "tyrant parity", pass,
           fmt("tyrant leech %.3f, altruistic %.3f (need within 0.05), standard %.3f "
               "(need 0.10 below both)",
               tyr_leech, tyr_alt, s));
  }

  tyrant_collapse();

  // 8
  {
    const double l = runs.mean_median(p_ignore, "leech");
    const double a = runs.mean_median(p_ignore, "altruistic");
    const bool pass = tyr_leech - l >= 0.05 && a >= tyr_alt;
    report(8, "ignore-tyrants exploit", pass,
           fmt("tyrant leech %.3f -> %.3f (need drop >=0.05), altruistic %.3f -> %.3f "
               "(must not decrease)",
               tyr_leech, l, tyr_alt, a));
  }

  determinism_conservation(runs);
  scaling();

  std::printf("swarm runs %.0f s, total %.0f s; %d criteria failed\n", swarm_wall,
              seconds_since(t_start), failures);
  return failures == 0 ? 0 : 1;
}
