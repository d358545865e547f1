#include "severfit/dist.hpp"

#include <cmath>

namespace severfit {

RandomSource::RandomSource(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  engine_.seed(seq);
}

double exp_cdf(const ExponentialModel& m, double x) {
  if (std::isnan(x) || x < 0.0) throw DomainError("exp_cdf: x must be >= 0");
  if (std::isinf(x)) return 1.0;
  return -std::expm1(-x / m.theta);
}

double exp_pdf(const ExponentialModel& m, double x) {
  if (std::isnan(x) || x < 0.0) throw DomainError("exp_pdf: x must be >= 0");
  return std::exp(-x / m.theta) / m.theta;
}

double exp_quantile(const ExponentialModel& m, double v) {
  if (!(v >= 0.0 && v < 1.0)) throw DomainError("exp_quantile: v must lie in [0, 1)");
  return -m.theta * std::log1p(-v);
}

double pareto1_cdf(const ParetoIModel& m, double y) {
  if (std::isnan(y)) throw DomainError("pareto1_cdf: y is NaN");
  if (y <= m.x0) return 0.0;
  if (std::isinf(y)) return 1.0;
  // 1 - (x0/y)^alpha via expm1.
  return -std::expm1(-m.alpha * std::log(y / m.x0));
}

double pareto1_pdf(const ParetoIModel& m, double y) {
  if (std::isnan(y)) throw DomainError("pareto1_pdf: y is NaN");
  if (y <= m.x0 || std::isinf(y)) return 0.0;
  return m.alpha / y * std::pow(m.x0 / y, m.alpha);
}

double pareto1_quantile(const ParetoIModel& m, double v) {
  if (!(v >= 0.0 && v < 1.0)) throw DomainError("pareto1_quantile: v must lie in [0, 1)");
  return m.x0 * std::exp(-std::log1p(-v) / m.alpha);
}

double regularized_upper_gamma3(double x) {
  if (std::isnan(x) || x < 0.0) throw DomainError("incomplete gamma: x must be >= 0");
  if (std::isinf(x)) return 0.0;
  return std::exp(-x) * (1.0 + x + 0.5 * x * x);
}

double regularized_incomplete_gamma3(double x) {
  if (std::isnan(x) || x < 0.0) throw DomainError("incomplete gamma: x must be >= 0");
  if (std::isinf(x)) return 1.0;
  if (x < 0.5) {
    // Lower-tail series:
    // P(3,x) = e^{-x} sum_{k>=3} x^k / k!
    double term = x * x * x / 6.0;
    double sum = 0.0;
    for (int k = 3; k < 60 && term > 1e-300; ++k) {
      sum += term;
      term *= x / (k + 1);
      if (term < sum * 1e-18) break;
    }
    return std::exp(-x) * sum;
  }
  return 1.0 - regularized_upper_gamma3(x);
}

std::pair<ExponentialModel, ThresholdPair> log_transform_pareto_to_exp(const ParetoIModel& m,
                                                                       const ThresholdPair& t) {
  if (t.d < m.x0) throw DomainError("log transform: d must be >= x0");
  const double lower = std::log(t.d / m.x0);
  const double upper = t.upper_infinite() ? kInf : std::log(t.u / m.x0);
  return {ExponentialModel(1.0 / m.alpha), ThresholdPair(lower, upper)};
}

std::vector<double> sample(const ExponentialModel& m, std::size_t n, RandomSource& rng) {
  if (n == 0) throw DomainError("sample: n must be >= 1");
  std::vector<double> out(n);
  for (auto& x : out) x = -m.theta * std::log1p(-rng.uniform());
  return out;
}

std::vector<double> sample(const ParetoIModel& m, std::size_t n, RandomSource& rng) {
  if (n == 0) throw DomainError("sample: n must be >= 1");
  std::vector<double> out(n);
  for (auto& y : out) y = m.x0 * std::exp(-std::log1p(-rng.uniform()) / m.alpha);
  return out;
}

}  // namespace severfit
