#include "severfit/estimators.hpp"

#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <cstdint>
#include <functional>

#include "severfit/asymptotics.hpp"
#include "severfit/dist.hpp"
#include "severfit/errors.hpp"
#include "severfit/moments.hpp"

namespace severfit {

std::string_view to_string(NoSolutionReason r) {
  switch (r) {
    case NoSolutionReason::None: return "None";
    case NoSolutionReason::BelowLowerBound: return "BelowLowerBound";
    case NoSolutionReason::AboveUpperBound: return "AboveUpperBound";
  }
  return "?";
}

namespace {

constexpr double kBoundaryMargin = 1e-12;
constexpr int kMaxIterations = 200;
constexpr int kMaxBracketSteps = 2200;

void require_data(std::span<const double> data) {
  if (data.empty()) throw DomainError("data must be non-empty");
}

struct RootResult {
  double root;
  SolverDiagnostics diag;
};

// Root of an increasing map f(x) = target for x > 0, found by doubling/halving
// from x0 to a sign-change bracket and then TOMS 748 (safeguarded
// secant/inverse-cubic with bisection fallback).
RootResult solve_increasing(const std::function<double(double)>& f, double target, double x0,
                            double residual_tol) {
  double lo = x0;
  double hi = x0;
  int steps = 0;
  if (f(x0) < target) {
    while (f(hi) < target) {
      lo = hi;
      hi *= 2.0;
      if (++steps > kMaxBracketSteps || !std::isfinite(hi))
        throw SolverStall("could not bracket root from above", hi);
    }
  } else {
    while (f(lo) > target) {
      hi = lo;
      lo *= 0.5;
      if (++steps > kMaxBracketSteps || !(lo > 0.0))
        throw SolverStall("could not bracket root from below", lo);
    }
  }
  auto g = [&](double x) { return f(x) - target; };
  RootResult out{};
  out.diag.bracket_lo = lo;
  out.diag.bracket_hi = hi;
  const double g_lo = g(lo);
  const double g_hi = g(hi);
  if (g_lo == 0.0 || g_hi == 0.0) {
    out.root = g_lo == 0.0 ? lo : hi;
  } else {
    std::uintmax_t iters = kMaxIterations;
    auto tol = [](double a, double b) {
      return std::abs(b - a) <= 1e-12 * std::min(std::abs(a), std::abs(b));
    };
    const auto [a, b] = boost::math::tools::toms748_solve(g, lo, hi, g_lo, g_hi, tol, iters);
    out.diag.iterations = static_cast<int>(iters);
    const double ga = std::abs(g(a));
    const double gb = std::abs(g(b));
    out.root = ga <= gb ? a : b;
    if (iters >= static_cast<std::uintmax_t>(kMaxIterations) && !tol(a, b))
      throw SolverStall("root finder hit the iteration cap", std::min(ga, gb));
  }
  out.diag.residual = std::abs(g(out.root));
  if (!(out.diag.residual <= residual_tol))
    throw SolverStall("root finder residual above tolerance", out.diag.residual);
  return out;
}

EstimateResult no_solution(Method m, Model model, double mu_hat, NoSolutionReason reason) {
  EstimateResult r;
  r.method = m;
  r.model = model;
  r.exists = false;
  r.reason = reason;
  r.mu_hat = mu_hat;
  return r;
}

// Checks lo < mu_hat < hi with the boundary margin; returns the violated side.
NoSolutionReason check_interval(double mu_hat, double lo, double hi, double margin) {
  if (!(mu_hat > lo + margin)) return NoSolutionReason::BelowLowerBound;
  if (!(mu_hat < hi - margin)) return NoSolutionReason::AboveUpperBound;
  return NoSolutionReason::None;
}

void attach_avar(EstimateResult& r, const ThresholdPair& t) {
  if (!r.estimate) return;
  try {
    r.avar = avar(r.method, *r.estimate, t);
  } catch (const DegenerateError&) {
    r.avar.reset();
  }
}

EstimateResult solve_exp(Method method, const std::function<double(double)>& forward,
                         double mu_hat, const ThresholdPair& t, double upper_bound) {
  if (!std::isfinite(mu_hat)) throw DomainError("mu_hat must be finite");
  const double margin = t.upper_infinite() ? kBoundaryMargin * std::max(1.0, std::abs(t.d))
                                           : kBoundaryMargin * t.width();
  const auto reason = check_interval(mu_hat, t.d, upper_bound, margin);
  if (reason != NoSolutionReason::None) return no_solution(method, Model::Exp, mu_hat, reason);

  EstimateResult r;
  r.method = method;
  r.model = Model::Exp;
  r.exists = true;
  r.mu_hat = mu_hat;
  const double x0 = std::max(mu_hat - t.d, 1e-6);
  const double tol = 1e-10 * std::max(1.0, t.upper_infinite() ? mu_hat - t.d : t.width());
  const auto root = solve_increasing(forward, mu_hat, x0, tol);
  r.estimate = root.root;
  r.diagnostics = root.diag;
  attach_avar(r, t);
  return r;
}

}  // namespace

SampleMoments sample_mtum(std::span<const double> data, const ThresholdPair& t) {
  require_data(data);
  SampleMoments s;
  s.n = data.size();
  double sum = 0.0;
  for (double x : data) {
    if (t.contains(x)) {
      sum += x;
      ++s.n_window;
    }
  }
  if (s.n_window == 0) throw EmptyWindow("no observation inside (d, u]");
  s.mu_hat = sum / static_cast<double>(s.n_window);
  return s;
}

SampleMoments sample_mcm(std::span<const double> data, const ThresholdPair& t) {
  require_data(data);
  SampleMoments s;
  s.n = data.size();
  double sum = 0.0;
  for (double x : data) {
    if (x <= t.d) {
      sum += t.d;
    } else if (x <= t.u) {
      sum += x;
      ++s.n_window;
    } else {
      sum += t.u;
    }
  }
  s.mu_hat = sum / static_cast<double>(s.n);
  return s;
}

SampleMoments sample_mtcm(std::span<const double> data, const ThresholdPair& t) {
  require_data(data);
  SampleMoments s;
  s.n = data.size();
  double sum = 0.0;
  for (double x : data) {
    if (x <= t.d) continue;
    ++s.n_above_d;
    if (x <= t.u) {
      sum += x;
      ++s.n_window;
    } else {
      sum += t.u;
    }
  }
  if (s.n_above_d == 0) throw EmptyWindow("no observation above d");
  s.mu_hat = sum / static_cast<double>(s.n_above_d);
  return s;
}

EstimateResult mle_exp(std::span<const double> data) {
  require_data(data);
  double sum = 0.0;
  for (double x : data) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("mle_exp: data must be finite and >= 0");
    sum += x;
  }
  if (sum == 0.0) throw DegenerateError("mle_exp: all observations are zero");
  EstimateResult r;
  r.method = Method::MLE;
  r.model = Model::Exp;
  r.exists = true;
  r.n = data.size();
  r.mu_hat = sum / static_cast<double>(data.size());
  r.estimate = r.mu_hat;
  r.avar = r.mu_hat * r.mu_hat;
  return r;
}

EstimateResult mle_pareto1(std::span<const double> data, double x0) {
  require_data(data);
  if (!(x0 > 0.0)) throw DomainError("mle_pareto1: x0 must be > 0");
  std::vector<double> logs;
  logs.reserve(data.size());
  for (double y : data) {
    if (!(y > x0) || !std::isfinite(y)) throw DomainError("mle_pareto1: data must exceed x0");
    logs.push_back(std::log(y / x0));
  }
  auto r = mle_exp(logs);
  r.model = Model::Pareto1;
  const double alpha = 1.0 / *r.estimate;
  r.estimate = alpha;
  r.avar = alpha * alpha;
  return r;
}

EstimateResult solve_mtum_exp(double mu_hat, const ThresholdPair& t) {
  if (t.upper_infinite()) {
    if (!std::isfinite(mu_hat)) throw DomainError("mu_hat must be finite");
    const auto reason =
        check_interval(mu_hat, t.d, kInf, kBoundaryMargin * std::max(1.0, std::abs(t.d)));
    if (reason != NoSolutionReason::None)
      return no_solution(Method::MTuM, Model::Exp, mu_hat, reason);
    EstimateResult r;
    r.method = Method::MTuM;
    r.exists = true;
    r.mu_hat = mu_hat;
    r.estimate = mu_hat - t.d;
    attach_avar(r, t);
    return r;
  }
  return solve_exp(Method::MTuM, [&t](double th) { return mu_mtum(th, t); }, mu_hat, t,
                   0.5 * (t.d + t.u));
}

EstimateResult solve_mcm_exp(double mu_hat, const ThresholdPair& t) {
  if (t.d == 0.0 && t.upper_infinite()) {
    if (!std::isfinite(mu_hat)) throw DomainError("mu_hat must be finite");
    if (!(mu_hat > 0.0))
      return no_solution(Method::MCM, Model::Exp, mu_hat, NoSolutionReason::BelowLowerBound);
    EstimateResult r;
    r.method = Method::MCM;
    r.exists = true;
    r.mu_hat = mu_hat;
    r.estimate = mu_hat;
    attach_avar(r, t);
    return r;
  }
  return solve_exp(Method::MCM, [&t](double th) { return mu_mcm(th, t); }, mu_hat, t, t.u);
}

EstimateResult solve_mtcm_exp(double mu_hat, const ThresholdPair& t) {
  if (t.upper_infinite()) {
    if (!std::isfinite(mu_hat)) throw DomainError("mu_hat must be finite");
    const auto reason =
        check_interval(mu_hat, t.d, kInf, kBoundaryMargin * std::max(1.0, std::abs(t.d)));
    if (reason != NoSolutionReason::None)
      return no_solution(Method::MTCM, Model::Exp, mu_hat, reason);
    EstimateResult r;
    r.method = Method::MTCM;
    r.exists = true;
    r.mu_hat = mu_hat;
    r.estimate = mu_hat - t.d;
    attach_avar(r, t);
    return r;
  }
  return solve_exp(Method::MTCM, [&t](double th) { return mu_mtcm(th, t); }, mu_hat, t, t.u);
}

EstimateResult solve_mtum_pareto1(double mu_hat, const ThresholdPair& t, double x0) {
  if (!std::isfinite(mu_hat)) throw DomainError("mu_hat must be finite");
  if (t.upper_infinite()) throw DomainError("solve_mtum_pareto1: u must be finite");
  if (!(x0 > 0.0) || t.d < x0) throw DomainError("solve_mtum_pareto1: need 0 < x0 <= d");
  const auto [lower, upper] = pareto_g_limits(t, x0);
  const double span_log = std::log(t.u / t.d);
  const auto reason = check_interval(mu_hat, lower, upper, kBoundaryMargin * span_log);
  if (reason != NoSolutionReason::None)
    return no_solution(Method::MTuM, Model::Pareto1, mu_hat, reason);

  EstimateResult r;
  r.method = Method::MTuM;
  r.model = Model::Pareto1;
  r.exists = true;
  r.mu_hat = mu_hat;
  // g is decreasing in alpha; solve the increasing map alpha -> -g(alpha).
  auto neg_g = [&](double alpha) { return -pareto_g_du(alpha, t, x0); };
  const double alpha0 = 1.0 / std::max(mu_hat - lower, 1e-6);
  const auto root = solve_increasing(neg_g, -mu_hat, alpha0, 1e-10 * std::max(1.0, span_log));
  r.estimate = root.root;
  r.diagnostics = root.diag;
  const ThresholdPair tx(std::log(t.d / x0), std::log(t.u / x0));
  try {
    r.avar = root.root * root.root / are_mtum(1.0 / root.root, tx);
    if (!(std::isfinite(*r.avar) && *r.avar > 0.0)) r.avar.reset();
  } catch (const DomainError&) {
    r.avar.reset();
  }
  return r;
}

namespace {

EstimateResult fit_exp(Method method, std::span<const double> data, const ThresholdPair& t) {
  for (double x : data)
    if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("EXP data must be finite and >= 0");
  EstimateResult r;
  switch (method) {
    case Method::MLE: return mle_exp(data);
    case Method::MTuM: r = solve_mtum_exp(sample_mtum(data, t).mu_hat, t); break;
    case Method::MCM: r = solve_mcm_exp(sample_mcm(data, t).mu_hat, t); break;
    case Method::MTCM: r = solve_mtcm_exp(sample_mtcm(data, t).mu_hat, t); break;
  }
  r.n = data.size();
  return r;
}

}  // namespace

EstimateResult fit(Method method, Model model, std::span<const double> data, const ThresholdPair& t,
                   std::optional<double> x0) {
  require_data(data);
  if (model == Model::Exp) return fit_exp(method, data, t);

  if (!x0 || !(*x0 > 0.0)) throw ConfigError("PARETO1 fits need x0 > 0");
  if (method == Method::MLE) return mle_pareto1(data, *x0);
  for (double y : data)
    if (!(y > *x0) || !std::isfinite(y)) throw DomainError("PARETO1 data must exceed x0");
  if (t.d < *x0) throw DomainError("PARETO1 thresholds need d >= x0");

  if (method == Method::MTuM && !t.upper_infinite()) {
    std::vector<double> logs;
    for (double y : data)
      if (t.contains(y)) logs.push_back(std::log(y / *x0));
    if (logs.empty()) throw EmptyWindow("no observation inside (d, u]");
    double sum = 0.0;
    for (double v : logs) sum += v;
    auto r = solve_mtum_pareto1(sum / static_cast<double>(logs.size()), t, *x0);
    r.n = data.size();
    return r;
  }

  std::vector<double> logs;
  logs.reserve(data.size());
  for (double y : data) logs.push_back(std::log(y / *x0));
  const auto [exp_model, tx] = log_transform_pareto_to_exp(ParetoIModel(1.0, *x0), t);
  (void)exp_model;
  auto r = fit_exp(method, logs, tx);
  r.model = Model::Pareto1;
  if (r.estimate) {
    const double alpha = 1.0 / *r.estimate;
    r.estimate = alpha;
    if (r.avar) r.avar = alpha * alpha * (*r.avar) * alpha * alpha;
  }
  return r;
}

}  // namespace severfit
