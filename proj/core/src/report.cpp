#include "swarmsim/metrics/report.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "swarmsim/engine/format.hpp"

#ifndef SWARMSIM_VERSION
#define SWARMSIM_VERSION "unknown"
#endif

namespace swarmsim {

const char* library_version() { return SWARMSIM_VERSION; }

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

void add_population(std::vector<SummaryRow>& rows, const std::string& role,
                    const PopulationSummary& s, std::uint64_t up, std::uint64_t down,
                    std::uint64_t dup) {
  rows.push_back({role, "nodes", static_cast<double>(s.nodes)});
  rows.push_back({role, "completed", static_cast<double>(s.completed)});
  rows.push_back({role, "completion_fraction", s.completion_fraction});
  if (s.median_efficiency) {
    rows.push_back({role, "median_efficiency", *s.median_efficiency});
    rows.push_back({role, "mean_efficiency", *s.mean_efficiency});
    rows.push_back({role, "median_download_s", *s.median_download_s});
  }
  rows.push_back({role, "bytes_up", static_cast<double>(up)});
  rows.push_back({role, "bytes_down", static_cast<double>(down)});
  rows.push_back({role, "duplicate_bytes", static_cast<double>(dup)});
}

}  // namespace

std::vector<SummaryRow> summary_rows(std::span<const NodeRecord> records, double n_bits) {
  std::vector<SummaryRow> rows;
  std::vector<NodeRecord> downloaders;
  for (Role role : {Role::kAltruistic, Role::kStandard, Role::kLeech}) {
    std::uint64_t up = 0, down = 0, dup = 0;
    for (const auto& r : records) {
      if (r.role != role) continue;
      up += r.bytes_up;
      down += r.bytes_down;
      dup += r.duplicate_bytes;
    }
    add_population(rows, std::string(to_string(role)), population_summary(records, role, n_bits),
                   up, down, dup);
  }
  // "all" pools every downloader under one role tag.
  std::uint64_t up = 0, down = 0, dup = 0;
  for (const auto& r : records) {
    if (r.role == Role::kInitialSeed) continue;
    auto copy = r;
    copy.role = Role::kStandard;
    downloaders.push_back(copy);
    up += r.bytes_up;
    down += r.bytes_down;
    dup += r.duplicate_bytes;
  }
  add_population(rows, "all", population_summary(downloaders, Role::kStandard, n_bits), up, down,
                 dup);
  return rows;
}

ReportPaths emit_report(const std::filesystem::path& dir, const RunMetadata& meta,
                        std::span<const NodeRecord> records, double n_bits,
                        double membership_step_s, double horizon_s) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create '" + dir.string() + "': " + ec.message());

  ReportPaths paths;
  const std::string prefix = meta.run_id + "_";
  paths.summary = dir / (prefix + "summary.csv");
  paths.nodes = dir / (prefix + "nodes.csv");
  paths.efficiency_cdf = dir / (prefix + "efficiency_cdf.csv");
  paths.membership = dir / (prefix + "membership.csv");
  paths.manifest = dir / (prefix + "manifest.txt");

  {
    auto out = open_out(paths.summary);
    out << "role,metric,value\n";
    for (const auto& row : summary_rows(records, n_bits)) {
      out << row.role << ',' << row.metric << ',' << format_real(row.value) << '\n';
    }
  }
  {
    auto out = open_out(paths.nodes);
    out << "id,role,trading,down_bps,up_bps,join_s,complete_s,leave_s,download_s,efficiency,"
           "bytes_up,bytes_down,duplicate_bytes,seeded_bytes_given\n";
    for (const auto& r : records) {
      const auto e = r.role == Role::kInitialSeed ? std::nullopt : efficiency(r, n_bits);
      out << r.id << ',' << to_string(r.role) << ',' << to_string(r.trading) << ','
          << format_real(r.k_bps) << ',' << format_real(r.up_bps) << ',' << format_real(r.t0_s)
          << ',' << (r.td_s ? format_real(*r.td_s) : "") << ','
          << (std::isinf(r.leave_s) ? "" : format_real(r.leave_s)) << ','
          << (r.td_s ? format_real(*r.td_s - r.t0_s) : "") << ','
          << (e ? format_real(*e) : "") << ',' << r.bytes_up << ',' << r.bytes_down << ','
          << r.duplicate_bytes << ',' << r.seeded_bytes_given << '\n';
    }
  }
  {
    auto out = open_out(paths.efficiency_cdf);
    out << "value,cum_fraction\n";
    std::vector<double> eff;
    for (const auto& r : records) {
      if (r.role == Role::kInitialSeed) continue;
      if (auto e = efficiency(r, n_bits)) eff.push_back(*e);
    }
    if (!eff.empty()) {
      for (const auto& p : cdf(std::move(eff))) {
        out << format_real(p.value) << ',' << format_real(p.fraction) << '\n';
      }
    }
  }
  {
    auto out = open_out(paths.membership);
    out << "t_s,downloading,seeding\n";
    for (const auto& s : membership_timeseries(records, membership_step_s, horizon_s)) {
      out << format_real(s.t_s) << ',' << s.downloading << ',' << s.seeding << '\n';
    }
  }
  {
    auto out = open_out(paths.manifest);
    out << "# swarmsim run manifest\n";
    out << "version = " << meta.version << '\n';
    out << "run_id = " << meta.run_id << '\n';
    out << "seed = " << meta.seed << '\n';
    for (const auto& [name, value] : meta.counters) out << name << " = " << value << '\n';
    out << "\n# configuration\n" << meta.config_text;
  }
  return paths;
}

}  // namespace swarmsim
