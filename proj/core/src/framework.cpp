#include "severfit/framework.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "quadrature.hpp"
#include "severfit/errors.hpp"

namespace severfit {

namespace {

void check_index(const TruncatedSpec& spec, std::size_t j) {
  if (j >= spec.k()) throw DomainError("moment index out of range");
}

double integrate_window(const DistributionAdapter& F, const ThresholdPair& w,
                        const std::function<double(double)>& g) {
  const double v_lo = F.cdf(w.d);
  const double v_hi = w.upper_infinite() ? 1.0 : F.cdf(w.u);
  if (!(v_hi > v_lo)) return 0.0;
  const double v_max = std::nextafter(1.0, 0.0);
  auto integrand = [&](double v) { return g(F.quantile(std::min(v, v_max))); };
  const auto r = detail::integrate_tanh_sinh(integrand, v_lo, v_hi, 1e-13);
  if (!std::isfinite(r.value) || r.error > 1e-10 * std::max(1.0, std::abs(r.value)))
    throw NumericError("population quadrature did not converge", r.error);
  return r.value;
}

double window_probability(const DistributionAdapter& F, const ThresholdPair& w) {
  const double hi = w.upper_infinite() ? 1.0 : F.cdf(w.u);
  return std::max(0.0, hi - F.cdf(w.d));
}

}  // namespace

std::optional<ThresholdPair> overlap_window(const TruncatedSpec& spec, std::size_t j,
                                            std::size_t j2) {
  check_index(spec, j);
  check_index(spec, j2);
  const auto& a = spec.moments[j].window;
  const auto& b = spec.moments[j2].window;
  const double d = std::max(a.d, b.d);
  const double u = std::min(a.u, b.u);
  if (!(d < u)) return std::nullopt;
  return ThresholdPair(d, u);
}

PopulationQuantities population_quantities(const DistributionAdapter& F,
                                           const TruncatedSpec& spec) {
  const auto k = static_cast<Eigen::Index>(spec.k());
  if (k < 1) throw DomainError("TruncatedSpec needs at least one moment");
  PopulationQuantities q;
  q.p = Eigen::VectorXd::Zero(k);
  q.mu_y = Eigen::VectorXd::Zero(k);
  q.p_jj = Eigen::MatrixXd::Zero(k, k);
  q.mu_yy = Eigen::MatrixXd::Zero(k, k);
  q.mu_w = Eigen::MatrixXd::Zero(k, k);

  for (Eigen::Index j = 0; j < k; ++j) {
    const auto& m = spec.moments[static_cast<std::size_t>(j)];
    q.p(j) = window_probability(F, m.window);
    q.mu_y(j) = integrate_window(F, m.window, m.h);
  }
  for (Eigen::Index j = 0; j < k; ++j) {
    const auto& hj = spec.moments[static_cast<std::size_t>(j)].h;
    for (Eigen::Index j2 = 0; j2 < k; ++j2) {
      const auto& hj2 = spec.moments[static_cast<std::size_t>(j2)].h;
      const auto o = overlap_window(spec, static_cast<std::size_t>(j), static_cast<std::size_t>(j2));
      if (!o) continue;
      if (j == j2) {
        q.p_jj(j, j) = q.p(j);
        q.mu_w(j, j) = q.mu_y(j);
      } else {
        q.p_jj(j, j2) = window_probability(F, *o);
        q.mu_w(j, j2) = integrate_window(F, *o, hj);
      }
      if (j2 < j) {
        q.mu_yy(j, j2) = q.mu_yy(j2, j);
      } else {
        q.mu_yy(j, j2) = integrate_window(F, *o, [&](double x) { return hj(x) * hj2(x); });
      }
    }
  }
  return q;
}

Eigen::VectorXd population_moments(const PopulationQuantities& q) {
  if ((q.p.array() <= 0.0).any()) throw DegenerateError("a moment window has zero probability");
  return q.mu_y.cwiseQuotient(q.p);
}

Eigen::MatrixXd sigma_v(const PopulationQuantities& q) {
  const auto k = static_cast<Eigen::Index>(q.k());
  Eigen::MatrixXd s(2 * k, 2 * k);
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index j2 = 0; j2 < k; ++j2) {
      s(j, j2) = q.mu_yy(j, j2) - q.mu_y(j) * q.mu_y(j2);
      s(j, k + j2) = q.mu_w(j, j2) - q.mu_y(j) * q.p(j2);
      s(k + j, j2) = q.mu_w(j2, j) - q.mu_y(j2) * q.p(j);
      s(k + j, k + j2) = q.p_jj(j, j2) - q.p(j) * q.p(j2);
    }
  }
  return s;
}

Eigen::MatrixXd d_v(const PopulationQuantities& q) {
  const auto k = static_cast<Eigen::Index>(q.k());
  if ((q.p.array() <= 0.0).any()) throw DegenerateError("a moment window has zero probability");
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(k, 2 * k);
  for (Eigen::Index j = 0; j < k; ++j) {
    d(j, j) = 1.0 / q.p(j);
    d(j, k + j) = -q.mu_y(j) / (q.p(j) * q.p(j));
  }
  return d;
}

Eigen::MatrixXd sigma_mu_explicit(const PopulationQuantities& q) {
  const auto k = static_cast<Eigen::Index>(q.k());
  if ((q.p.array() <= 0.0).any()) throw DegenerateError("a moment window has zero probability");
  Eigen::MatrixXd s(k, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index j2 = 0; j2 < k; ++j2) {
      const double pj = q.p(j);
      const double pj2 = q.p(j2);
      const double yj = q.mu_y(j);
      const double yj2 = q.mu_y(j2);
      s(j, j2) = (1.0 / pj2) * ((q.mu_yy(j, j2) - yj * yj2) / pj -
                                (q.mu_w(j, j2) - yj * pj2) * yj2 / (pj * pj2) -
                                (q.mu_w(j2, j) - yj2 * pj) * yj / (pj * pj) +
                                (q.p_jj(j, j2) - pj * pj2) * yj * yj2 / (pj * pj * pj2));
    }
  }
  return s;
}

Eigen::MatrixXd sigma_mu_product(const PopulationQuantities& q) {
  const Eigen::MatrixXd d = d_v(q);
  return d * sigma_v(q) * d.transpose();
}

Eigen::MatrixXd sigma_mu(const PopulationQuantities& q) {
  const Eigen::MatrixXd a = sigma_mu_explicit(q);
  const Eigen::MatrixXd b = sigma_mu_product(q);
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  const double gap = (a - b).cwiseAbs().maxCoeff();
  if (gap > 1e-10 * scale) throw NumericError("sigma_mu routes disagree", gap);
  return b;
}

Eigen::MatrixXd propagate_theta(const Eigen::MatrixXd& sigma, const Eigen::MatrixXd& D) {
  if (!D.allFinite()) throw DomainError("Jacobian must be finite");
  if (D.cols() != sigma.rows()) throw DomainError("Jacobian shape does not match sigma");
  Eigen::MatrixXd out = D * sigma * D.transpose();
  return 0.5 * (out + out.transpose());
}

bool is_symmetric_psd(const Eigen::MatrixXd& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol * scale) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()),
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol * scale;
}

AsymptoticReport asymptotic_report(const DistributionAdapter& F, const TruncatedSpec& spec,
                                   const std::optional<Eigen::MatrixXd>& D) {
  const auto q = population_quantities(F, spec);
  AsymptoticReport r;
  r.mu = population_moments(q);
  r.sigma_mu = sigma_mu(q);
  if (!is_symmetric_psd(r.sigma_mu)) throw NumericError("sigma_mu is not positive semidefinite", 0.0);
  if (D) {
    r.sigma_theta = propagate_theta(r.sigma_mu, *D);
    if (!is_symmetric_psd(*r.sigma_theta))
      throw NumericError("sigma_theta is not positive semidefinite", 0.0);
  }
  return r;
}

Eigen::VectorXd sample_moment_vector(std::span<const double> data, const TruncatedSpec& spec) {
  const auto k = static_cast<Eigen::Index>(spec.k());
  Eigen::VectorXd out(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const auto& m = spec.moments[static_cast<std::size_t>(j)];
    double sum = 0.0;
    std::size_t count = 0;
    for (double x : data) {
      if (m.window.contains(x)) {
        sum += m.h(x);
        ++count;
      }
    }
    if (count == 0)
      throw EmptyWindow("no observation inside window " + std::to_string(j),
                        static_cast<std::size_t>(j));
    out(j) = sum / static_cast<double>(count);
  }
  return out;
}

Eigen::MatrixXd finite_difference_jacobian(const VectorMap& g, const Eigen::VectorXd& x,
                                           double rel_step) {
  const Eigen::VectorXd g0 = g(x);
  Eigen::MatrixXd jac(g0.size(), x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = rel_step * std::max(1.0, std::abs(x(i)));
    Eigen::VectorXd xp = x;
    Eigen::VectorXd xm = x;
    xp(i) += h;
    xm(i) -= h;
    jac.col(i) = (g(xp) - g(xm)) / (xp(i) - xm(i));
  }
  return jac;
}

SystemSolution solve_system(const VectorMap& mu_of_theta, const Eigen::VectorXd& mu_hat,
                            const Eigen::VectorXd& theta0, int max_iter, double tol) {
  SystemSolution s;
  s.theta = theta0;
  auto residual_of = [&](const Eigen::VectorXd& th) -> Eigen::VectorXd {
    return mu_of_theta(th) - mu_hat;
  };
  Eigen::VectorXd res = residual_of(s.theta);
  s.residual = res.norm();
  const double target = tol * std::max(1.0, mu_hat.norm());
  for (; s.iterations < max_iter; ++s.iterations) {
    if (s.residual <= target) {
      s.converged = true;
      return s;
    }
    const Eigen::MatrixXd jac = finite_difference_jacobian(mu_of_theta, s.theta);
    const Eigen::VectorXd step = jac.colPivHouseholderQr().solve(-res);
    if (!step.allFinite()) return s;
    double lambda = 1.0;
    bool improved = false;
    for (int half = 0; half < 40; ++half, lambda *= 0.5) {
      const Eigen::VectorXd cand = s.theta + lambda * step;
      Eigen::VectorXd cand_res;
      try {
        cand_res = residual_of(cand);
      } catch (const std::exception&) {
        continue;
      }
      if (cand_res.allFinite() && cand_res.norm() < s.residual) {
        s.theta = cand;
        res = cand_res;
        s.residual = cand_res.norm();
        improved = true;
        break;
      }
    }
    if (!improved) return s;
  }
  s.converged = s.residual <= target;
  return s;
}

}  // namespace severfit
