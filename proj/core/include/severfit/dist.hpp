#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "severfit/thresholds.hpp"

namespace severfit {

struct ExponentialModel {
  double theta;

  explicit ExponentialModel(double mean) : theta(mean) {
    if (!(theta > 0.0 && std::isfinite(theta))) throw DomainError("exponential theta must be > 0");
  }
};

// Single-parameter Pareto with known left endpoint x0.
struct ParetoIModel {
  double alpha;
  double x0;

  ParetoIModel(double tail, double left_endpoint) : alpha(tail), x0(left_endpoint) {
    if (!(alpha > 0.0 && std::isfinite(alpha))) throw DomainError("pareto alpha must be > 0");
    if (!(x0 > 0.0 && std::isfinite(x0))) throw DomainError("pareto x0 must be > 0");
  }
};

// Reproducible uniform stream. Identical (seed, stream) pairs produce identical
// sequences; distinct stream indices are seeded independently.
class RandomSource {
 public:
  RandomSource(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

double exp_cdf(const ExponentialModel& m, double x);
double exp_pdf(const ExponentialModel& m, double x);
double exp_quantile(const ExponentialModel& m, double v);

double pareto1_cdf(const ParetoIModel& m, double y);
double pareto1_pdf(const ParetoIModel& m, double y);
double pareto1_quantile(const ParetoIModel& m, double v);

// Regularized lower incomplete gamma P(3, x) = 1 - e^{-x}(1 + x + x^2/2).
double regularized_incomplete_gamma3(double x);
// Upper complement Q(3, x) = e^{-x}(1 + x + x^2/2), exact 0 at +inf.
double regularized_upper_gamma3(double x);

// Pareto I on the Y-scale maps to Exp(1/alpha) on X = log(Y/x0).
std::pair<ExponentialModel, ThresholdPair> log_transform_pareto_to_exp(const ParetoIModel& m,
                                                                       const ThresholdPair& t);

// n iid inverse-cdf draws.
std::vector<double> sample(const ExponentialModel& m, std::size_t n, RandomSource& rng);
std::vector<double> sample(const ParetoIModel& m, std::size_t n, RandomSource& rng);

}  // namespace severfit
