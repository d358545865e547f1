#pragma once

// Test-only numerical references, written independently of the library's
// quadrature and closed forms.

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

namespace detail {

inline double simpson_step(const std::function<double(double)>& f, double a, double b, double fa,
                           double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson on [a, b] with Richardson correction; absolute tolerance.
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      double tol = 1e-13, int depth = 48) {
  if (a == b) return 0.0;
  // Presplit so the initial estimate cannot miss narrow features.
  constexpr int kPanels = 64;
  double total = 0.0;
  for (int i = 0; i < kPanels; ++i) {
    const double lo = a + (b - a) * i / kPanels;
    const double hi = i + 1 == kPanels ? b : a + (b - a) * (i + 1) / kPanels;
    const double flo = f(lo);
    const double fhi = f(hi);
    const double fm = f(0.5 * (lo + hi));
    const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi);
    total += detail::simpson_step(f, lo, hi, flo, fm, fhi, whole, tol / kPanels, depth);
  }
  return total;
}

// E[g(X)] restricted to (lo, hi] for X ~ Exp(theta); hi may be +inf (cut where
// the remaining tail is below 1e-30 of the scale).
inline double exp_expect(double theta, double lo, double hi, const std::function<double(double)>& g) {
  // Integrate in y = x - lo with e^{-lo/theta} factored out so the absolute
  // Simpson tolerance stays relative to the window's mass.
  const double top = std::isinf(hi) ? 80.0 * theta : hi - lo;
  const double inner =
      simpson([&](double y) { return g(lo + y) * std::exp(-y / theta) / theta; }, 0.0, top);
  return std::exp(-lo / theta) * inner;
}

inline double central_difference(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Five-point stencil, error O(h^4).
inline double five_point(const std::function<double(double)>& f, double x, double h) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12.0 * h);
}

// Exact exponential quantile, written from the definition.
inline double exp_q(double theta, double v) { return -theta * std::log(1.0 - v); }

struct MeanVar {
  double mean;
  double var;
};

inline MeanVar mean_var(const std::vector<double>& x) {
  double m = 0.0;
  for (double v : x) m += v;
  m /= static_cast<double>(x.size());
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return {m, s / static_cast<double>(x.size() - 1)};
}

}  // namespace oracle
