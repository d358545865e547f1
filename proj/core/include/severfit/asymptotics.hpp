#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "severfit/adapter.hpp"
#include "severfit/method.hpp"
#include "severfit/thresholds.hpp"

// Asymptotic efficiency of the threshold-moment estimators of the exponential
// mean relative to the MLE, whose per-observation variance is theta^2.
namespace severfit {

double are_mtum(double theta, const ThresholdPair& t);
double are_mcm(double theta, const ThresholdPair& t);
double are_mtcm(double theta, const ThresholdPair& t);
// Dispatch; MLE is 1 by definition.
double are(Method method, double theta, const ThresholdPair& t);

// Per-observation asymptotic variance theta^2 / ARE. Throws DegenerateError
// when the efficiency underflows to zero.
double avar(Method method, double theta, const ThresholdPair& t);

// I(a, 1-b) = int_a^{1-b} log(1-v) dv, closed form.
double mtm_integral_I(double a, double one_minus_b);
// J(a, 1-b) = double integral of (min(v,w) - vw) / ((1-v)(1-w)) over the square
// [a, 1-b]^2, by nested adaptive quadrature after s = -log(1-v).
double mtm_integral_J(double a, double one_minus_b);
// Trimmed-mean efficiency I^2 / J with lower/upper trimming proportions a, b.
double are_mtm(double a, double b);

// Influence function of the (a, b)-trimmed mean of F at x.
double influence_mtm(const DistributionAdapter& F, double a, double b, double x);
// Influence function of the (d, u)-censored mean of F at x.
double influence_mcm(const DistributionAdapter& F, const ThresholdPair& t, double x);

struct AREReport {
  Method method;
  double theta;
  double a;
  double b;
  std::optional<ThresholdPair> thresholds;  // absent when F^{-1}(a) >= F^{-1}(1-b)
  std::optional<double> are;
  std::optional<double> avar_per_obs;
};

// One report per (method, a, b), method-major then a then b. Thresholds are
// exact Exp(theta) quantiles; b = 0 maps to u = +inf.
std::vector<AREReport> are_table(double theta, std::span<const double> a_grid,
                                 std::span<const double> b_grid, std::span<const Method> methods);

// CSV columns: method,a,b,d,u,are. Absent cells keep d,u and leave are empty.
void write_are_csv(std::ostream& out, std::span<const AREReport> table);

enum class IFKind { MTM, MCM };

struct IFCurve {
  IFKind kind;
  double a;
  double b;
  std::vector<double> grid;
  std::vector<double> values;
};

// Evaluates the trimmed-mean (MTM) or censored-mean (MCM) influence function on
// a strictly increasing grid. Thresholds for MCM are F^{-1}(a), F^{-1}(1-b).
IFCurve influence_curve(const DistributionAdapter& F, IFKind kind, double a, double b,
                        std::span<const double> grid);

}  // namespace severfit
