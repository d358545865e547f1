#pragma once

#include <utility>

#include "severfit/thresholds.hpp"

// Closed-form population moments of Exp(theta) seen through a threshold window
// (d, u], plus their theta-derivatives. Every formula treats u = +inf as the
// analytic limit (terms carrying e^{-u/theta} vanish).
namespace severfit {

struct TailQuantities {
  double a;    // F(d)
  double b;    // 1 - F(u) = e^{-u/theta}
  double tau;  // 1 - F(d) = e^{-d/theta}
  double p;    // F(u) - F(d)
};

// Moments of Y = X 1{d < X <= u}.
struct TruncatedSummary {
  double mu_y;
  double mu_y2;
  double sigma_y2;
};

// Moments of W = X 1{d < X <= u} + u 1{X > u}.
struct PaymentSummary {
  double mu_w;
  double e_w2;
  double sigma_w2;
};

TailQuantities tail_quantities(double theta, const ThresholdPair& t);
TruncatedSummary truncated_summary(double theta, const ThresholdPair& t);

// E[X | d < X <= u]. Increasing in theta from d to (d+u)/2 (to +inf when u = +inf).
double mu_mtum(double theta, const ThresholdPair& t);
// d mu_mtum / d theta = 1 - (r/2)^2 csch^2(r/2), r = (u-d)/theta.
double mu_mtum_dtheta(double theta, const ThresholdPair& t);
// d theta / d mu_mtum, product form p^2 theta^2 / (p^2 theta^2 - e^{-(d+u)/theta}(u-d)^2).
double mtum_theta_prime(double theta, const ThresholdPair& t);
// The same derivative assembled from the unsimplified expression that carries
// mu_mtum in the denominator.
double mtum_theta_prime_unsimplified(double theta, const ThresholdPair& t);

// Censored mean E[min(max(d, X), u)] = d + theta p.
double mu_mcm(double theta, const ThresholdPair& t);
double mcm_second_moment(double theta, const ThresholdPair& t);
double sigma_mcm2(double theta, const ThresholdPair& t);
double mu_mcm_dtheta(double theta, const ThresholdPair& t);

// Payment-type mean E[W] / (1 - F(d)) = d + theta (1 - e^{-(u-d)/theta}).
double mu_mtcm(double theta, const ThresholdPair& t);
PaymentSummary mtcm_w_summary(double theta, const ThresholdPair& t);
double mu_mtcm_dtheta(double theta, const ThresholdPair& t);

// E[log(Y/x0) | d < Y <= u] for Y ~ Pareto I(alpha, x0); strictly decreasing in alpha.
// Requires x0 <= d < u < inf on the Y-scale.
double pareto_g_du(double alpha, const ThresholdPair& t, double x0);

// (lim alpha->inf, lim alpha->0+) of pareto_g_du; first < second.
std::pair<double, double> pareto_g_limits(const ThresholdPair& t, double x0);

}  // namespace severfit
