#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "severfit/dist.hpp"
#include "severfit/method.hpp"
#include "severfit/thresholds.hpp"

namespace severfit {

// Independent stream for (cell, block, replication). Stream indices pack
// cell < 2^16, block < 2^16, replication < 2^32 into one 64-bit word.
RandomSource derive_stream(std::uint64_t master_seed, std::uint64_t cell_index,
                           std::uint64_t block_index, std::uint64_t replication_index);

// Workers used by the simulation paths: SEVERFIT_THREADS when set to a positive
// integer, otherwise the hardware concurrency.
unsigned default_worker_count();

// Exact model quantiles F^{-1}(a), F^{-1}(1-b); b = 0 gives u = +inf. Throws
// DomainError when the window is empty.
ThresholdPair quantile_thresholds(Model model, double param, double x0, double a, double b);

struct SimCell {
  std::size_t n = 50;
  Method method = Method::MTuM;
  Model model = Model::Exp;
  double param_true = 10.0;  // theta for EXP, alpha for PARETO1
  double x0 = 1.0;
  ThresholdPair thresholds;
  double a = 0.0;
  double b = 0.0;
  std::size_t replications_per_block = 2000;
  std::size_t blocks = 10;
  std::uint64_t seed = 0;
  std::uint64_t cell_index = 0;
  // Report mean_ratio/re over successful replications even when some failed.
  bool conditional = false;
};

struct SimReport {
  SimCell cell;
  std::optional<double> mean_ratio;
  std::optional<double> se_mean_ratio;
  std::optional<double> re;
  std::optional<double> se_re;
  std::size_t failures = 0;
  std::size_t total = 0;
};

// threads = 0 uses default_worker_count(). Output is independent of threads.
SimReport run_cell(const SimCell& cell, unsigned threads = 0);
std::vector<SimReport> run_table(std::span<const SimCell> cells, unsigned threads = 0);

// Columns method,a,b,d,u,n,mean_ratio,se_mean_ratio,re,se_re,failures,total.
// With analytic = true, one extra row per (method, a, b) carries n = inf and the
// asymptotic efficiency in the re column.
void write_sim_csv(std::ostream& out, std::span<const SimReport> reports, bool analytic = true);

struct SimConfig {
  double theta = 10.0;
  std::vector<Method> methods{Method::MTuM, Method::MCM, Method::MTCM};
  std::vector<std::pair<double, double>> design_points{
      {0.0, 0.0}, {0.05, 0.05}, {0.10, 0.10}, {0.15, 0.15}, {0.25, 0.25}, {0.10, 0.70}, {0.25, 0.0}};
  std::vector<std::size_t> n_list{50, 100, 250, 500, 1000};
  std::size_t blocks = 10;
  std::size_t reps = 2000;
  std::uint64_t seed = 20240601;
  std::string out;
};

// `key = value` lines; '#' starts a comment. Throws ConfigError naming the key.
SimConfig parse_sim_config(std::istream& in);
// Cells in design-point, n, method order with consecutive cell indices.
std::vector<SimCell> expand_config(const SimConfig& cfg);

struct HistogramPanel {
  Method method;
  std::size_t n;
  std::vector<std::size_t> replicate;  // replicate index of each kept estimate
  std::vector<double> estimates;
  std::size_t failures = 0;
  double skewness = 0.0;
  double bin_width = 0.0;
  double bin_origin = 0.0;
  std::vector<std::size_t> bin_counts;
};

struct HistogramStudy {
  std::vector<std::size_t> n_list{30, 50, 500};
  std::size_t count = 100;
  std::vector<Method> methods{Method::MTuM, Method::MCM, Method::MTCM};
  double theta = 10.0;
  ThresholdPair thresholds{0.50, 23.00};
  std::uint64_t seed = 20240601;
};

// Every method is fitted on the same simulated samples. Bins follow the
// Freedman-Diaconis rule.
std::vector<HistogramPanel> histogram_study(const HistogramStudy& study, unsigned threads = 0);

// Biased moment skewness m3 / m2^{3/2}; 0 when the spread is zero.
double sample_skewness(std::span<const double> x);

}  // namespace severfit
