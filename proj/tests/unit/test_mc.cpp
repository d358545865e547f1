#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "oracles.hpp"
#include "severfit/asymptotics.hpp"
#include "severfit/csv.hpp"
#include "severfit/errors.hpp"
#include "severfit/mc.hpp"

using namespace severfit;

namespace {

SimCell small_cell(Method m, double a, double b, std::size_t n) {
  SimCell c;
  c.n = n;
  c.method = m;
  c.param_true = 10.0;
  c.thresholds = quantile_thresholds(Model::Exp, 10.0, 1.0, a, b);
  c.a = a;
  c.b = b;
  c.replications_per_block = 200;
  c.blocks = 5;
  c.seed = 99;
  c.cell_index = 3;
  return c;
}

}  // namespace

TEST(DeriveStream, SameInputsSameStream) {
  auto a = derive_stream(1, 2, 3, 4);
  auto b = derive_stream(1, 2, 3, 4);
  for (int i = 0; i < 64; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
  EXPECT_THROW(derive_stream(1, 1u << 16, 0, 0), DomainError);
  EXPECT_THROW(derive_stream(1, 0, 0, 1ULL << 32), DomainError);
}

TEST(DeriveStream, NoCollisionsOverAMillionDerivations) {
  std::unordered_set<std::uint64_t> first;
  first.reserve(1'100'000);
  std::size_t count = 0;
  for (std::uint64_t cell = 0; cell < 4; ++cell)
    for (std::uint64_t block = 0; block < 10; ++block)
      for (std::uint64_t rep = 0; rep < 25'000; ++rep) {
        first.insert(derive_stream(20240601, cell, block, rep).next_u64());
        ++count;
      }
  EXPECT_EQ(count, 1'000'000u);
  EXPECT_EQ(first.size(), count);
}

TEST(QuantileThresholds, ExponentialAndPareto) {
  const auto t = quantile_thresholds(Model::Exp, 10.0, 1.0, 0.05, 0.0);
  EXPECT_NEAR(t.d, 0.5129329438755, 1e-12);
  EXPECT_TRUE(t.upper_infinite());
  const auto p = quantile_thresholds(Model::Pareto1, 1.0, 1.0, 0.5, 0.25);
  EXPECT_NEAR(p.d, 2.0, 1e-14);
  EXPECT_NEAR(p.u, 4.0, 1e-13);
  EXPECT_THROW(quantile_thresholds(Model::Exp, 10.0, 1.0, 0.6, 0.4), DomainError);
}

TEST(RunCell, BitIdenticalAcrossThreadCounts) {
  const auto c = small_cell(Method::MCM, 0.05, 0.05, 60);
  const auto r1 = run_cell(c, 1);
  const auto r4 = run_cell(c, 4);
  EXPECT_EQ(*r1.mean_ratio, *r4.mean_ratio);
  EXPECT_EQ(*r1.se_mean_ratio, *r4.se_mean_ratio);
  EXPECT_EQ(*r1.re, *r4.re);
  EXPECT_EQ(*r1.se_re, *r4.se_re);
  EXPECT_EQ(r1.total, 1000u);
  EXPECT_EQ(r1.failures, 0u);
}

TEST(RunCell, FullWindowBehavesLikeMle) {
  auto c = small_cell(Method::MTuM, 0.0, 0.0, 50);
  c.replications_per_block = 1000;
  const auto r = run_cell(c);
  ASSERT_TRUE(r.re.has_value());
  EXPECT_NEAR(*r.re, 1.0, std::max(3.0 * *r.se_re, 0.03));
  EXPECT_NEAR(*r.mean_ratio, 1.0, 3.0 * *r.se_mean_ratio + 1e-3);
}

TEST(RunCell, FailuresSuppressStatisticsUnlessConditional) {
  auto c = small_cell(Method::MTuM, 0.10, 0.70, 100);
  const auto r = run_cell(c);
  EXPECT_GT(r.failures, 0u);
  EXPECT_LE(r.failures, r.total);
  EXPECT_FALSE(r.re.has_value());
  EXPECT_FALSE(r.mean_ratio.has_value());
  c.conditional = true;
  const auto rc = run_cell(c);
  EXPECT_EQ(rc.failures, r.failures);
  EXPECT_TRUE(rc.re.has_value());
  EXPECT_GE(*rc.se_re, 0.0);
}

TEST(RunCell, RejectsInvalidCells) {
  auto c = small_cell(Method::MCM, 0.05, 0.05, 50);
  c.blocks = 0;
  EXPECT_THROW(run_cell(c), ConfigError);
  c = small_cell(Method::MCM, 0.05, 0.05, 50);
  c.model = Model::Pareto1;
  c.x0 = 1.0;  // d = 0.51 < x0
  EXPECT_THROW(run_cell(c), ConfigError);
}

TEST(RunCell, ParetoCellsEstimateAlpha) {
  SimCell c;
  c.n = 200;
  c.method = Method::MCM;
  c.model = Model::Pareto1;
  c.param_true = 2.0;
  c.x0 = 1.0;
  c.a = 0.05;
  c.b = 0.05;
  c.thresholds = quantile_thresholds(Model::Pareto1, 2.0, 1.0, 0.05, 0.05);
  c.replications_per_block = 200;
  c.blocks = 5;
  const auto r = run_cell(c);
  ASSERT_TRUE(r.mean_ratio.has_value());
  EXPECT_NEAR(*r.mean_ratio, 1.0, 0.02);
}

TEST(SimCsv, ColumnsAndAnalyticRows) {
  std::vector<SimReport> reports;
  for (Method m : {Method::MTuM, Method::MCM, Method::MTCM}) {
    SimReport r;
    r.cell = small_cell(m, 0.05, 0.05, 50);
    r.total = 10;
    reports.push_back(r);
  }
  std::ostringstream out;
  write_sim_csv(out, reports);
  std::istringstream in(out.str());
  const auto csv = read_csv(in, true);
  EXPECT_EQ(csv.header, (std::vector<std::string>{"method", "a", "b", "d", "u", "n", "mean_ratio",
                                                  "se_mean_ratio", "re", "se_re", "failures", "total"}));
  ASSERT_EQ(csv.rows.size(), 6u);
  const double expected[] = {0.442, 0.918, 0.868};
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(csv.rows[3 + i][5], "inf");
    EXPECT_NEAR(*parse_double(csv.rows[3 + i][8]), expected[i], 0.001);
    EXPECT_EQ(csv.rows[i][8], "");
  }
}

TEST(SimConfigParser, ParsesAllKeys) {
  std::istringstream in(
      "# study\n"
      "theta = 5\n"
      "methods = mcm, MTCM\n"
      "design_points = (0.05,0.05), (0.25, 0)\n"
      "n_list = 50,100\n"
      "blocks = 3\n"
      "reps = 40   # small\n"
      "seed = 17\n"
      "out = result.csv\n");
  const auto cfg = parse_sim_config(in);
  EXPECT_EQ(cfg.theta, 5.0);
  EXPECT_EQ(cfg.methods, (std::vector<Method>{Method::MCM, Method::MTCM}));
  ASSERT_EQ(cfg.design_points.size(), 2u);
  EXPECT_EQ(cfg.design_points[1], (std::pair<double, double>{0.25, 0.0}));
  EXPECT_EQ(cfg.n_list, (std::vector<std::size_t>{50, 100}));
  EXPECT_EQ(cfg.blocks, 3u);
  EXPECT_EQ(cfg.reps, 40u);
  EXPECT_EQ(cfg.seed, 17u);
  EXPECT_EQ(cfg.out, "result.csv");
  const auto cells = expand_config(cfg);
  ASSERT_EQ(cells.size(), 8u);
  EXPECT_EQ(cells.back().cell_index, 7u);
  EXPECT_TRUE(cells.back().thresholds.upper_infinite());
}

TEST(SimConfigParser, ErrorsNameTheKey) {
  auto message = [](const std::string& text) {
    std::istringstream in(text);
    try {
      parse_sim_config(in);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(message("colour = red\n").find("colour"), std::string::npos);
  EXPECT_NE(message("reps = many\n").find("reps"), std::string::npos);
  EXPECT_NE(message("design_points = (0.5, 0.6)\n").find("design_points"), std::string::npos);
  EXPECT_NE(message("design_points = 0.5, 0.1\n").find("design_points"), std::string::npos);
  EXPECT_NE(message("methods = mle, bogus\n").find("methods"), std::string::npos);
  EXPECT_NE(message("just words\n"), "");
}

TEST(Skewness, KnownValues) {
  EXPECT_EQ(sample_skewness(std::vector<double>{1, 1, 1}), 0.0);
  EXPECT_NEAR(sample_skewness(std::vector<double>{1, 2, 3}), 0.0, 1e-15);
  // m2 = 12.5, m3 = 45 for {1, 2, 3, 10}.
  const std::vector<double> x{1, 2, 3, 10};
  EXPECT_NEAR(sample_skewness(x), 45.0 / std::pow(12.5, 1.5), 1e-12);
}

TEST(HistogramStudyTest, DeterministicWithConsistentBins) {
  HistogramStudy s;
  s.n_list = {30, 500};
  s.count = 100;
  const auto a = histogram_study(s, 1);
  const auto b = histogram_study(s, 3);
  ASSERT_EQ(a.size(), 6u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].estimates, b[i].estimates);
    EXPECT_EQ(a[i].estimates.size() + a[i].failures, 100u);
    const auto total = std::accumulate(a[i].bin_counts.begin(), a[i].bin_counts.end(), std::size_t{0});
    EXPECT_EQ(total, a[i].estimates.size());
    EXPECT_GT(a[i].bin_width, 0.0);
  }
  EXPECT_THROW(histogram_study(HistogramStudy{{30}, 1}), ConfigError);
}

TEST(HistogramStudyTest, CensoredEstimatorIsCentredAtSmallN) {
  HistogramStudy s;
  s.n_list = {30};
  s.count = 2000;
  s.methods = {Method::MCM};
  const auto p = histogram_study(s).front();
  const auto mv = oracle::mean_var(p.estimates);
  EXPECT_NEAR(mv.mean, 10.0, 3.0 * std::sqrt(mv.var / p.estimates.size()) + 0.1);
}

TEST(Convergence, LargeSampleEfficiencyAndBias) {
  SimConfig cfg;
  cfg.n_list = {500, 1000};
  cfg.blocks = 10;
  cfg.reps = 300;
  const auto cells = expand_config(cfg);
  for (const auto& c : cells) {
    if (c.method == Method::MTuM && c.a == 0.10 && c.b == 0.70) continue;
    const auto r = run_cell(c);
    ASSERT_TRUE(r.re.has_value()) << to_string(c.method) << " " << c.a << " " << c.b << " n=" << c.n;
    if (c.n == 1000) {
      const double ref = are(c.method, 10.0, c.thresholds);
      EXPECT_LT(std::abs(*r.re - ref), std::max(0.02, 4.0 * *r.se_re))
          << to_string(c.method) << " " << c.a << " " << c.b;
    }
    if (c.n == 500 && c.method != Method::MTuM)
      EXPECT_LT(std::abs(*r.mean_ratio - 1.0), 0.01) << to_string(c.method) << " " << c.a << " " << c.b;
  }
}
