#include "quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace severfit::detail {

namespace {

// Interval only a few ulps wide.
bool negligible_width(double lo, double hi) {
  return std::isfinite(lo) && std::isfinite(hi) &&
         std::abs(hi - lo) <= 16.0 * std::numeric_limits<double>::epsilon() *
                                   std::max(std::abs(lo), std::abs(hi));
}

}  // namespace

QuadResult integrate_gk(const std::function<double(double)>& f, double lo, double hi,
                        double rel_tol, unsigned max_depth) {
  if (lo == hi) return {0.0, 0.0};
  if (negligible_width(lo, hi)) return {(hi - lo) * f(0.5 * (lo + hi)), 0.0};
  double error = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, max_depth, rel_tol,
                                                                    &error);
  return {value, error};
}

QuadResult integrate_tanh_sinh(const std::function<double(double)>& f, double lo, double hi,
                               double rel_tol) {
  if (lo == hi) return {0.0, 0.0};
  if (negligible_width(lo, hi)) return {(hi - lo) * f(0.5 * (lo + hi)), 0.0};
  thread_local boost::math::quadrature::tanh_sinh<double> integrator(15);
  double error = 0.0;
  const double value = integrator.integrate(f, lo, hi, rel_tol, &error);
  return {value, error};
}

}  // namespace severfit::detail
