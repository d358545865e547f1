#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "severfit/method.hpp"
#include "severfit/thresholds.hpp"

namespace severfit {

struct SampleMoments {
  double mu_hat = 0.0;
  std::size_t n = 0;
  std::size_t n_window = 0;   // d < x <= u (MTuM)
  std::size_t n_above_d = 0;  // x > d (MTCM)
};

enum class NoSolutionReason { None, BelowLowerBound, AboveUpperBound };

std::string_view to_string(NoSolutionReason r);

struct SolverDiagnostics {
  int iterations = 0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  double residual = 0.0;
};

struct EstimateResult {
  Method method = Method::MLE;
  Model model = Model::Exp;
  // theta_hat for EXP, alpha_hat for PARETO1. Absent when exists is false.
  std::optional<double> estimate;
  bool exists = false;
  NoSolutionReason reason = NoSolutionReason::None;
  // Per-observation asymptotic variance at the estimate (n * Var).
  std::optional<double> avar;
  double mu_hat = 0.0;
  std::size_t n = 0;
  SolverDiagnostics diagnostics;
};

// Sample statistics. The window indicator is 1{d < x <= u}.
SampleMoments sample_mtum(std::span<const double> data, const ThresholdPair& t);
SampleMoments sample_mcm(std::span<const double> data, const ThresholdPair& t);
SampleMoments sample_mtcm(std::span<const double> data, const ThresholdPair& t);

EstimateResult mle_exp(std::span<const double> data);
EstimateResult mle_pareto1(std::span<const double> data, double x0);

// Moment-matching solvers for Exp(theta). Each returns exists = false, with the
// side of the violated bound, whenever mu_hat falls outside the open interval
// on which the forward map is a bijection:
//   MTuM: (d, (d+u)/2)   MCM: (d, u)   MTCM: (d, u)
// mu_hat within 1e-12 (u-d) of a bound is treated as outside.
EstimateResult solve_mtum_exp(double mu_hat, const ThresholdPair& t);
EstimateResult solve_mcm_exp(double mu_hat, const ThresholdPair& t);
EstimateResult solve_mtcm_exp(double mu_hat, const ThresholdPair& t);

// Pareto I truncated-moment solver on the Y-scale; mu_hat is the window mean
// of log(y/x0). Requires x0 <= d < u < inf.
EstimateResult solve_mtum_pareto1(double mu_hat, const ThresholdPair& t, double x0);

// End-to-end estimate: sample statistic, solver, asymptotic variance at the
// estimate. Thresholds are on the data scale (Y-scale for PARETO1); MLE ignores
// them. Throws EmptyWindow when the method's window holds no observation.
EstimateResult fit(Method method, Model model, std::span<const double> data,
                   const ThresholdPair& t, std::optional<double> x0 = std::nullopt);

}  // namespace severfit
