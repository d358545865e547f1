#pragma once

#include <functional>
#include <string>

namespace severfit {

// Continuous ground-up distribution described by its cdf, density and quantile.
struct DistributionAdapter {
  std::function<double(double)> cdf;
  std::function<double(double)> pdf;
  std::function<double(double)> quantile;
  double support_lo = 0.0;
  double support_hi = 0.0;
  std::string name;
};

DistributionAdapter exponential_adapter(double theta);
DistributionAdapter pareto1_adapter(double alpha, double x0);

}  // namespace severfit
