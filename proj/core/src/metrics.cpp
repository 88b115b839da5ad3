#include "swarmsim/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace swarmsim {

double efficiency(double n_bits, double t0_s, double td_s, double k_bps) {
  if (!(td_s > t0_s) || !(k_bps > 0.0) || !(n_bits > 0.0)) {
    throw std::invalid_argument("efficiency needs td > t0, k > 0 and n > 0");
  }
  return n_bits / (td_s - t0_s) / k_bps;
}

std::optional<double> efficiency(const NodeRecord& rec, double n_bits) {
  if (!rec.td_s) return std::nullopt;
  return efficiency(n_bits, rec.t0_s, *rec.td_s, rec.k_bps);
}

std::vector<CdfPoint> cdf(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("cdf of an empty sample");
  std::sort(values.begin(), values.end());
  const auto n = static_cast<double>(values.size());
  std::vector<CdfPoint> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i + 1 < values.size() && values[i + 1] == values[i]) continue;
    out.push_back({values[i], static_cast<double>(i + 1) / n});
  }
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

PopulationSummary population_summary(std::span<const NodeRecord> records, Role role,
                                     double n_bits) {
  PopulationSummary out;
  out.role = role;
  std::vector<double> eff;
  std::vector<double> dl;
  for (const auto& r : records) {
    if (r.role != role) continue;
    ++out.nodes;
    if (!r.td_s) continue;
    ++out.completed;
    eff.push_back(*efficiency(r, n_bits));
    dl.push_back(*r.td_s - r.t0_s);
  }
  out.completion_fraction =
      out.nodes ? static_cast<double>(out.completed) / static_cast<double>(out.nodes) : 0.0;
  if (!eff.empty()) {
    double sum = 0.0;
    for (double e : eff) sum += e;
    out.mean_efficiency = sum / static_cast<double>(eff.size());
    out.median_efficiency = median(eff);
    out.median_download_s = median(dl);
    out.efficiency_cdf = cdf(std::move(eff));
  }
  return out;
}

Aggregate aggregate(std::span<const double> values) {
  Aggregate a;
  a.n = values.size();
  if (a.n == 0) return a;
  double sum = 0.0;
  for (double v : values) sum += v;
  a.mean = sum / static_cast<double>(a.n);
  if (a.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - a.mean) * (v - a.mean);
    a.stddev = std::sqrt(ss / static_cast<double>(a.n - 1));
  }
  a.ci95_sigma = 1.96 * a.stddev;
  a.ci95_normal = a.ci95_sigma / std::sqrt(static_cast<double>(a.n));
  return a;
}

std::vector<MembershipSample> membership_timeseries(std::span<const NodeRecord> records,
                                                    double step_s, double horizon_s) {
  if (!(step_s > 0.0)) throw std::invalid_argument("membership step must be positive");
  std::vector<MembershipSample> out;
  const auto steps = static_cast<std::size_t>(std::floor(horizon_s / step_s + 1e-9));
  out.reserve(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) {
    MembershipSample s;
    s.t_s = static_cast<double>(i) * step_s;
    for (const auto& r : records) {
      if (r.role == Role::kInitialSeed) continue;
      if (r.td_s) {
        if (r.t0_s <= s.t_s && s.t_s <= *r.td_s) ++s.downloading;
        const double seed_end = std::min(*r.td_s + r.seed_duration_s, r.leave_s);
        if (*r.td_s <= s.t_s && s.t_s < seed_end) ++s.seeding;
      } else if (r.t0_s <= s.t_s && s.t_s < r.leave_s) {
        ++s.downloading;
      }
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace swarmsim
