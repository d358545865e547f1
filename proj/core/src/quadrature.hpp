#pragma once

#include <functional>

namespace severfit::detail {

struct QuadResult {
  double value;
  double error;
};

// Adaptive Gauss-Kronrod (15/31). Either limit may be infinite.
QuadResult integrate_gk(const std::function<double(double)>& f, double lo, double hi,
                        double rel_tol = 1e-12, unsigned max_depth = 20);

// Double-exponential rule on a finite interval; tolerates integrable endpoint
// singularities and never evaluates the endpoints.
QuadResult integrate_tanh_sinh(const std::function<double(double)>& f, double lo, double hi,
                               double rel_tol = 1e-12);

}  // namespace severfit::detail
