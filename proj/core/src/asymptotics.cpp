#include "severfit/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "quadrature.hpp"
#include "severfit/csv.hpp"
#include "severfit/errors.hpp"
#include "severfit/moments.hpp"

namespace severfit {

namespace {

void require_probability_window(double a, double b) {
  if (!(a >= 0.0 && b >= 0.0 && a + b < 1.0))
    throw DomainError("tail probabilities must satisfy a, b >= 0 and a + b < 1");
}

// x log x with the 0 log 0 = 0 convention.
double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

}  // namespace

double are_mtum(double theta, const ThresholdPair& t) {
  // (p^2 theta^2 - e^{-(d+u)/theta}(u-d)^2) / (p theta^2) = p * dmu/dtheta.
  const auto q = tail_quantities(theta, t);
  return q.p * mu_mtum_dtheta(theta, t);
}

double are_mcm(double theta, const ThresholdPair& t) {
  const double mu_y = truncated_summary(theta, t).mu_y;
  return mu_y * mu_y / sigma_mcm2(theta, t);
}

double are_mtcm(double theta, const ThresholdPair& t) {
  const auto q = tail_quantities(theta, t);
  const double br = t.upper_infinite() ? 0.0 : q.b * t.width() / theta;
  const double lead = q.p - br;
  return lead * lead / (q.p * (1.0 + q.b / q.tau) - 2.0 * br);
}

double are(Method method, double theta, const ThresholdPair& t) {
  switch (method) {
    case Method::MLE: return 1.0;
    case Method::MTuM: return are_mtum(theta, t);
    case Method::MCM: return are_mcm(theta, t);
    case Method::MTCM: return are_mtcm(theta, t);
  }
  throw DomainError("unknown method");
}

double avar(Method method, double theta, const ThresholdPair& t) {
  const double e = are(method, theta, t);
  if (!(e > 0.0)) throw DegenerateError("asymptotic efficiency is zero; variance undefined");
  return theta * theta / e;
}

double mtm_integral_I(double a, double one_minus_b) {
  if (!(0.0 <= a && a < one_minus_b && one_minus_b <= 1.0))
    throw DomainError("mtm_integral_I: need 0 <= a < 1-b <= 1");
  const double b = 1.0 - one_minus_b;
  // [-(s log s - s)] evaluated from s = 1-a down to s = b.
  return xlogx(1.0 - a) - xlogx(b) - (one_minus_b - a);
}

double mtm_integral_J(double a, double one_minus_b) {
  if (!(0.0 <= a && a < one_minus_b && one_minus_b <= 1.0))
    throw DomainError("mtm_integral_J: need 0 <= a < 1-b <= 1");
  const double s_lo = -std::log1p(-a);
  // The kernel is bounded by e^{-t}; an infinite range is cut at s + 45 and the
  // neglected mass is charged to the error.
  constexpr double kSCut = 45.0;
  const double s_true_hi = one_minus_b >= 1.0 ? kInf : -std::log1p(-one_minus_b);
  const double s_hi = std::min(s_true_hi, std::max(kSCut, s_lo + kSCut));
  const double cut_error = s_hi < s_true_hi ? 2.0 * std::exp(-s_hi) * (1.0 + s_hi) : 0.0;

  // After v = 1 - e^{-s}, dv / (1-v) = ds, so the kernel times the Jacobian is
  // min(v,w) - vw. Integrate over the triangle s <= t and double.
  // min(v,w) - vw = min(v,w) (1 - max(v,w)).
  auto kernel = [](double s, double t) {
    return -std::expm1(-std::min(s, t)) * std::exp(-std::max(s, t));
  };
  double inner_error = 0.0;
  auto inner = [&](double s) {
    // Depth-capped; the inner error estimates are charged to the total.
    const auto r = detail::integrate_gk([&](double t) { return kernel(s, t); }, s, s_hi, 1e-12, 6);
    inner_error = std::max(inner_error, r.error);
    return r.value;
  };
  const auto outer = detail::integrate_gk(inner, s_lo, s_hi, 1e-10);
  const double achieved = 2.0 * (outer.error + inner_error * std::max(1.0, s_hi - s_lo)) + cut_error;
  if (!std::isfinite(outer.value) || !(achieved <= 1e-9))
    throw NumericError("mtm_integral_J: quadrature did not reach 1e-9", achieved);
  return 2.0 * outer.value;
}

double are_mtm(double a, double b) {
  require_probability_window(a, b);
  const double i = mtm_integral_I(a, 1.0 - b);
  return i * i / mtm_integral_J(a, 1.0 - b);
}

namespace {

// int_a^{1-b} (v - 1{F(x) <= v}) / f(F^{-1}(v)) dv, split at the indicator jump.
double influence_integral(const DistributionAdapter& F, double a, double one_minus_b, double x) {
  const double fx = F.cdf(x);
  const double split = std::clamp(fx, a, one_minus_b);
  auto density_at = [&](double v) {
    const double dens = F.pdf(F.quantile(v));
    if (!(dens > 0.0)) throw NumericError("influence function: zero density inside window", v);
    return dens;
  };
  const auto below =
      detail::integrate_tanh_sinh([&](double v) { return v / density_at(v); }, a, split, 1e-12);
  const auto above =
      detail::integrate_tanh_sinh([&](double v) { return (v - 1.0) / density_at(v); }, split,
                                  one_minus_b, 1e-12);
  const double achieved = below.error + above.error;
  const double scale = std::max(1.0, std::abs(below.value) + std::abs(above.value));
  if (!(achieved <= 1e-9 * scale))
    throw NumericError("influence function: quadrature did not reach tolerance", achieved);
  return below.value + above.value;
}

}  // namespace

double influence_mtm(const DistributionAdapter& F, double a, double b, double x) {
  require_probability_window(a, b);
  return influence_integral(F, a, 1.0 - b, x) / (1.0 - a - b);
}

double influence_mcm(const DistributionAdapter& F, const ThresholdPair& t, double x) {
  const double a = F.cdf(t.d);
  const double one_minus_b = t.upper_infinite() ? 1.0 : F.cdf(t.u);
  require_probability_window(a, 1.0 - one_minus_b);
  return influence_integral(F, a, one_minus_b, x);
}

IFCurve influence_curve(const DistributionAdapter& F, IFKind kind, double a, double b,
                        std::span<const double> grid) {
  require_probability_window(a, b);
  if (!std::is_sorted(grid.begin(), grid.end()) ||
      std::adjacent_find(grid.begin(), grid.end()) != grid.end())
    throw DomainError("influence_curve: grid must be strictly increasing");
  IFCurve curve{kind, a, b, {grid.begin(), grid.end()}, {}};
  curve.values.reserve(grid.size());
  std::optional<ThresholdPair> window;
  if (kind == IFKind::MCM) {
    const double d = a > 0.0 ? F.quantile(a) : F.support_lo;
    const double u = b > 0.0 ? F.quantile(1.0 - b) : kInf;
    window = ThresholdPair(d, u);
  }
  for (double x : grid) {
    curve.values.push_back(kind == IFKind::MTM ? influence_mtm(F, a, b, x)
                                               : influence_mcm(F, *window, x));
  }
  return curve;
}

std::vector<AREReport> are_table(double theta, std::span<const double> a_grid,
                                 std::span<const double> b_grid, std::span<const Method> methods) {
  if (!std::is_sorted(a_grid.begin(), a_grid.end()) ||
      !std::is_sorted(b_grid.begin(), b_grid.end()))
    throw DomainError("are_table: grids must be sorted");
  std::vector<AREReport> out;
  out.reserve(methods.size() * a_grid.size() * b_grid.size());
  for (Method m : methods) {
    for (double a : a_grid) {
      for (double b : b_grid) {
        if (!(a >= 0.0 && a < 1.0 && b >= 0.0 && b < 1.0))
          throw DomainError("are_table: grid values must lie in [0, 1)");
        AREReport r{m, theta, a, b, std::nullopt, std::nullopt, std::nullopt};
        const double d = -theta * std::log1p(-a);
        const double u = b > 0.0 ? -theta * std::log(b) : kInf;
        // a + b >= 1 also catches d == u up to rounding in the two quantile paths.
        if (d < u && a + b < 1.0 - 1e-12) {
          r.thresholds = ThresholdPair(d, u);
          r.are = are(m, theta, *r.thresholds);
          if (*r.are > 0.0) r.avar_per_obs = theta * theta / *r.are;
        } else {
          r.thresholds = std::nullopt;
        }
        out.push_back(r);
      }
    }
  }
  return out;
}

void write_are_csv(std::ostream& out, std::span<const AREReport> table) {
  CsvWriter w(out);
  w.row({"method", "a", "b", "d", "u", "are"});
  for (const auto& r : table) {
    const double d = -r.theta * std::log1p(-r.a);
    const double u = r.b > 0.0 ? -r.theta * std::log(r.b) : kInf;
    w.row({std::string(to_string(r.method)), format_double(r.a), format_double(r.b),
           format_double(d), format_double(u), r.are ? format_double(*r.are) : std::string()});
  }
}

}  // namespace severfit
