#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "swarmsim/engine/format.hpp"
#include "swarmsim/engine/rng.hpp"
#include "swarmsim/metrics/metrics.hpp"
#include "swarmsim/metrics/report.hpp"

namespace swarmsim {
namespace {

namespace fs = std::filesystem;

TEST(Metrics, EfficiencyExamples) {
  // 64 MiB at 1 Mbit/s capacity in 1073.741824 s is exactly capacity.
  const double bits = 64.0 * 1048576 * 8;
  EXPECT_DOUBLE_EQ(efficiency(bits, 0.0, bits / 1e6, 1e6), 1.0);
  EXPECT_DOUBLE_EQ(efficiency(bits, 100.0, 100.0 + 2 * bits / 1e6, 1e6), 0.5);
  EXPECT_THROW(efficiency(bits, 5.0, 5.0, 1e6), std::invalid_argument);
  EXPECT_THROW(efficiency(bits, 0.0, 1.0, 0.0), std::invalid_argument);
  NodeRecord r;
  r.k_bps = 1e6;
  EXPECT_FALSE(efficiency(r, bits).has_value());
  r.td_s = bits / 1e6;
  EXPECT_DOUBLE_EQ(*efficiency(r, bits), 1.0);
}

TEST(Metrics, MedianExamples) {
  EXPECT_DOUBLE_EQ(median({3.0}), 3.0);
  EXPECT_DOUBLE_EQ(median({4.0, 1.0, 3.0, 2.0}), 2.5);
  EXPECT_DOUBLE_EQ(median({5.0, 1.0, 3.0}), 3.0);
  EXPECT_THROW(median({}), std::invalid_argument);
}

TEST(Metrics, MedianMatchesSortOracle) {
  Rng rng = make_stream(21, StreamTag::kFixture);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> v(1 + uniform_index(rng, 40));
    for (auto& x : v) x = static_cast<double>(uniform_index(rng, 10));
    auto s = v;
    std::sort(s.begin(), s.end());
    const std::size_t n = s.size();
    const double want = n % 2 ? s[n / 2] : (s[n / 2 - 1] + s[n / 2]) / 2;
    ASSERT_DOUBLE_EQ(median(v), want);
  }
}

TEST(Metrics, CdfSteps) {
  const auto c = cdf({0.5, 0.2, 0.5, 0.9});
  ASSERT_EQ(c.size(), 3u);
  EXPECT_DOUBLE_EQ(c[0].value, 0.2);
  EXPECT_DOUBLE_EQ(c[0].fraction, 0.25);
  EXPECT_DOUBLE_EQ(c[1].value, 0.5);
  EXPECT_DOUBLE_EQ(c[1].fraction, 0.75);
  EXPECT_DOUBLE_EQ(c[2].fraction, 1.0);
  EXPECT_THROW(cdf({}), std::invalid_argument);
}

TEST(Metrics, AggregateExamples) {
  std::vector<double> v = {1, 2, 3, 4, 5};
  const auto a = aggregate(v);
  EXPECT_EQ(a.n, 5u);
  EXPECT_DOUBLE_EQ(a.mean, 3.0);
  EXPECT_NEAR(a.stddev, std::sqrt(2.5), 1e-12);
  EXPECT_NEAR(a.ci95_normal, 1.96 * std::sqrt(2.5) / std::sqrt(5.0), 1e-12);
  EXPECT_NEAR(a.ci95_sigma, 1.96 * std::sqrt(2.5), 1e-12);
  std::vector<double> one = {7};
  EXPECT_DOUBLE_EQ(aggregate(one).stddev, 0.0);
}

std::vector<NodeRecord> sample_records() {
  const double bits = 8e6;
  std::vector<NodeRecord> r(4);
  r[0] = {0, Role::kInitialSeed, TradingKind::kTft, 1e6, 1e6, 0.0, 0.0};
  r[1] = {1, Role::kLeech, TradingKind::kTft, 1e6, 5e5, 0.0, bits / 1e6, 0.0, bits / 1e6};
  r[2] = {2, Role::kStandard, TradingKind::kTft, 1e6, 5e5, 10.0, 10.0 + 2 * bits / 1e6, 5.0};
  r[2].leave_s = *r[2].td_s + 5.0;
  r[3] = {3, Role::kStandard, TradingKind::kTft, 2e6, 1e6, 20.0, std::nullopt};
  r[3].leave_s = 30.0;
  return r;
}

TEST(Metrics, PopulationSummaryCountsIncomplete) {
  const auto r = sample_records();
  const auto s = population_summary(r, Role::kStandard, 8e6);
  EXPECT_EQ(s.nodes, 2u);
  EXPECT_EQ(s.completed, 1u);
  EXPECT_DOUBLE_EQ(s.completion_fraction, 0.5);
  EXPECT_DOUBLE_EQ(*s.median_efficiency, 0.5);
  const auto none = population_summary(r, Role::kAltruistic, 8e6);
  EXPECT_EQ(none.nodes, 0u);
  EXPECT_FALSE(none.median_efficiency.has_value());
}

TEST(Metrics, MembershipIntervals) {
  const auto r = sample_records();
  // Node 2 downloads on [10, 26] and seeds on [26, 31); node 3 downloads
  // on [20, 30); node 1 downloads on [0, 8].
  const auto m = membership_timeseries(r, 5.0, 30.0);
  ASSERT_EQ(m.size(), 7u);
  EXPECT_EQ(m[0].downloading, 1u);  // t=0: node 1
  EXPECT_EQ(m[2].downloading, 1u);  // t=10: node 2
  EXPECT_EQ(m[4].downloading, 2u);  // t=20
  EXPECT_EQ(m[6].downloading, 0u);  // t=30: node 3 gone
  EXPECT_EQ(m[6].seeding, 1u);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Report, WritesIdenticalFilesForIdenticalInput) {
  const auto r = sample_records();
  RunMetadata meta{"unit", 3, library_version(), "run.seed = 3\n", {{"events", 12}}};
  const fs::path base = fs::path(::testing::TempDir()) / "swarmsim_report_test";
  fs::remove_all(base);
  const auto a = emit_report(base / "a", meta, r, 8e6, 5.0, 30.0);
  const auto b = emit_report(base / "b", meta, r, 8e6, 5.0, 30.0);
  for (auto member : {&ReportPaths::summary, &ReportPaths::nodes, &ReportPaths::efficiency_cdf,
                      &ReportPaths::membership, &ReportPaths::manifest}) {
    ASSERT_TRUE(fs::exists(a.*member));
    EXPECT_EQ(slurp(a.*member), slurp(b.*member));
  }
  EXPECT_NE(slurp(a.summary).find("standard,median_efficiency,0.5"), std::string::npos);
  fs::remove_all(base);
}

TEST(Report, SummaryRowsIncludeAll) {
  const auto rows = summary_rows(sample_records(), 8e6);
  const auto it = std::find_if(rows.begin(), rows.end(), [](const SummaryRow& s) {
    return s.role == "all" && s.metric == "nodes";
  });
  ASSERT_NE(it, rows.end());
  EXPECT_DOUBLE_EQ(it->value, 3.0);
}

TEST(Format, ShortestRoundTrip) {
  EXPECT_EQ(format_real(20.0), "20");
  EXPECT_EQ(format_real(0.1), "0.1");
  EXPECT_EQ(std::stod(format_real(1.0 / 3)), 1.0 / 3);
}

}  // namespace
}  // namespace swarmsim
