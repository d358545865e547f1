#pragma once

#include <cmath>
#include <limits>

#include "severfit/errors.hpp"

namespace severfit {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Lower/upper truncation-censoring points. The window is (d, u]; u may be +inf.
struct ThresholdPair {
  double d = 0.0;
  double u = kInf;

  ThresholdPair() = default;
  ThresholdPair(double lower, double upper) : d(lower), u(upper) {
    if (!(std::isfinite(d) && d >= 0.0)) throw DomainError("threshold d must be finite and >= 0");
    if (std::isnan(u) || !(d < u)) throw DomainError("thresholds must satisfy d < u");
  }

  bool upper_infinite() const noexcept { return std::isinf(u); }
  double width() const noexcept { return u - d; }

  // Half-open membership 1{d < x <= u}.
  bool contains(double x) const noexcept { return d < x && x <= u; }

  friend bool operator==(const ThresholdPair&, const ThresholdPair&) = default;
};

}  // namespace severfit
