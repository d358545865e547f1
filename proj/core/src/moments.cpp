#include "severfit/moments.hpp"

#include <cmath>

#include "severfit/dist.hpp"
#include "severfit/errors.hpp"

namespace severfit {

namespace {

void require_theta(double theta) {
  if (!(theta > 0.0 && std::isfinite(theta))) throw DomainError("theta must be finite and > 0");
}

// 1 - r / (e^r - 1), stable for small and large r.
double one_minus_r_over_expm1(double r) {
  if (r < 1e-4) return r / 2.0 - r * r / 12.0 + r * r * r * r / 720.0;
  if (r > 700.0) return 1.0;
  return 1.0 - r / std::expm1(r);
}

// 1 - (x / sinh x)^2, stable for small and large x.
double one_minus_x_csch_sq(double x) {
  if (x < 1e-4) return x * x / 3.0 - 2.0 * x * x * x * x / 15.0;
  if (x > 350.0) return 1.0;
  const double ratio = x / std::sinh(x);
  return 1.0 - ratio * ratio;
}

// u e^{-u/theta} and u^2 e^{-u/theta}, zero at u = +inf.
double u_times_b(double u, double b) { return std::isinf(u) ? 0.0 : u * b; }
double u2_times_b(double u, double b) { return std::isinf(u) ? 0.0 : u * u * b; }

}  // namespace

TailQuantities tail_quantities(double theta, const ThresholdPair& t) {
  require_theta(theta);
  TailQuantities q{};
  q.tau = std::exp(-t.d / theta);
  q.a = -std::expm1(-t.d / theta);
  q.b = t.upper_infinite() ? 0.0 : std::exp(-t.u / theta);
  q.p = t.upper_infinite() ? q.tau : -q.tau * std::expm1(-(t.u - t.d) / theta);
  return q;
}

TruncatedSummary truncated_summary(double theta, const ThresholdPair& t) {
  const auto q = tail_quantities(theta, t);
  TruncatedSummary s{};
  s.mu_y = theta * q.p + t.d * q.tau - u_times_b(t.u, q.b);
  s.mu_y2 = 2.0 * theta * theta *
            (regularized_upper_gamma3(t.d / theta) - regularized_upper_gamma3(t.u / theta));
  s.sigma_y2 = s.mu_y2 - s.mu_y * s.mu_y;
  return s;
}

double mu_mtum(double theta, const ThresholdPair& t) {
  require_theta(theta);
  if (t.upper_infinite()) return theta + t.d;
  return t.d + theta * one_minus_r_over_expm1(t.width() / theta);
}

double mu_mtum_dtheta(double theta, const ThresholdPair& t) {
  require_theta(theta);
  if (t.upper_infinite()) return 1.0;
  return one_minus_x_csch_sq(t.width() / (2.0 * theta));
}

double mtum_theta_prime(double theta, const ThresholdPair& t) {
  const auto q = tail_quantities(theta, t);
  if (t.upper_infinite()) return 1.0;
  const double pt2 = q.p * q.p * theta * theta;
  const double w = t.width();
  return pt2 / (pt2 - std::exp(-(t.d + t.u) / theta) * w * w);
}

double mtum_theta_prime_unsimplified(double theta, const ThresholdPair& t) {
  const auto q = tail_quantities(theta, t);
  const double d = t.d;
  const double u = t.u;
  const double mu = truncated_summary(theta, t).mu_y / q.p;
  const double de = d * q.tau;
  const double ue = u_times_b(u, q.b);
  const double ue2 = std::isinf(u) ? 0.0 : u * q.b * (theta + u);
  const double denom = de * (theta + d) - ue2 + q.p * theta * theta - mu * (de - ue);
  return q.p * theta * theta / denom;
}

double mu_mcm(double theta, const ThresholdPair& t) {
  const auto q = tail_quantities(theta, t);
  return t.d + theta * q.p;
}

double mcm_second_moment(double theta, const ThresholdPair& t) {
  const auto q = tail_quantities(theta, t);
  const auto s = truncated_summary(theta, t);
  return t.d * t.d * q.a + s.mu_y2 + u2_times_b(t.u, q.b);
}

double sigma_mcm2(double theta, const ThresholdPair& t) {
  // Literal E[Z] = d(1 - e^{-d/theta}) + mu_Y + u e^{-u/theta}.
  const auto q = tail_quantities(theta, t);
  const double mu = t.d * q.a + truncated_summary(theta, t).mu_y + u_times_b(t.u, q.b);
  return mcm_second_moment(theta, t) - mu * mu;
}

double mu_mcm_dtheta(double theta, const ThresholdPair& t) {
  // d/dtheta [d + theta p] = mu_Y / theta.
  return truncated_summary(theta, t).mu_y / theta;
}

double mu_mtcm(double theta, const ThresholdPair& t) {
  require_theta(theta);
  if (t.upper_infinite()) return t.d + theta;
  return t.d - theta * std::expm1(-t.width() / theta);
}

PaymentSummary mtcm_w_summary(double theta, const ThresholdPair& t) {
  const auto q = tail_quantities(theta, t);
  const auto s = truncated_summary(theta, t);
  PaymentSummary w{};
  w.mu_w = s.mu_y + u_times_b(t.u, q.b);
  w.e_w2 = s.mu_y2 + u2_times_b(t.u, q.b);
  w.sigma_w2 = w.e_w2 - w.mu_w * w.mu_w;
  return w;
}

double mu_mtcm_dtheta(double theta, const ThresholdPair& t) {
  require_theta(theta);
  if (t.upper_infinite()) return 1.0;
  // 1 - e^{-r} - r e^{-r}, r = (u-d)/theta.
  const double r = t.width() / theta;
  return -std::expm1(-r) - r * std::exp(-r);
}

double pareto_g_du(double alpha, const ThresholdPair& t, double x0) {
  if (!(alpha > 0.0 && std::isfinite(alpha))) throw DomainError("pareto_g_du: alpha must be > 0");
  if (!(x0 > 0.0)) throw DomainError("pareto_g_du: x0 must be > 0");
  if (t.upper_infinite()) throw DomainError("pareto_g_du: u must be finite");
  if (t.d < x0) throw DomainError("pareto_g_du: d must be >= x0");
  // A_du / (alpha (u^a - d^a)) with numerator and denominator divided by u^a so
  // that large alpha does not overflow; rho = (d/u)^alpha.
  const double log_ratio = std::log(t.d / t.u);
  const double rho = std::exp(alpha * log_ratio);
  const double one_minus_rho = -std::expm1(alpha * log_ratio);
  const double log_x0_d = std::log(x0 / t.d);
  const double log_x0_u = std::log(x0 / t.u);
  const double numer = one_minus_rho - alpha * (log_x0_d - rho * log_x0_u);
  return numer / (alpha * one_minus_rho);
}

std::pair<double, double> pareto_g_limits(const ThresholdPair& t, double x0) {
  if (!(x0 > 0.0)) throw DomainError("pareto_g_limits: x0 must be > 0");
  if (t.upper_infinite()) throw DomainError("pareto_g_limits: u must be finite");
  if (t.d < x0) throw DomainError("pareto_g_limits: d must be >= x0");
  const double ld = std::log(t.d);
  const double lu = std::log(t.u);
  const double lower = -std::log(x0 / t.d);
  const double upper =
      (lu * lu - ld * ld - 2.0 * lu * std::log(x0 / t.d) + 2.0 * ld * std::log(x0 / t.u)) /
      (2.0 * std::log(t.u / t.d));
  return {lower, upper};
}

}  // namespace severfit
