#include "severfit/adapter.hpp"

#include "severfit/dist.hpp"

namespace severfit {

DistributionAdapter exponential_adapter(double theta) {
  const ExponentialModel m(theta);
  DistributionAdapter a;
  a.cdf = [m](double x) { return x <= 0.0 ? 0.0 : exp_cdf(m, x); };
  a.pdf = [m](double x) { return x < 0.0 ? 0.0 : exp_pdf(m, x); };
  a.quantile = [m](double v) { return exp_quantile(m, v); };
  a.support_lo = 0.0;
  a.support_hi = kInf;
  a.name = "exp";
  return a;
}

DistributionAdapter pareto1_adapter(double alpha, double x0) {
  const ParetoIModel m(alpha, x0);
  DistributionAdapter a;
  a.cdf = [m](double y) { return pareto1_cdf(m, y); };
  a.pdf = [m](double y) { return pareto1_pdf(m, y); };
  a.quantile = [m](double v) { return pareto1_quantile(m, v); };
  a.support_lo = x0;
  a.support_hi = kInf;
  a.name = "pareto1";
  return a;
}

}  // namespace severfit
