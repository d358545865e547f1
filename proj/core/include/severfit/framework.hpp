#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "severfit/adapter.hpp"
#include "severfit/thresholds.hpp"

// General k-equation truncated-moment machinery: population quantities by
// quadrature, the joint covariance of the (Y, Z) sample means, and delta-method
// propagation to the moment vector and to the parameter vector.
namespace severfit {

struct TruncatedMoment {
  std::function<double(double)> h;
  ThresholdPair window;
};

struct TruncatedSpec {
  std::vector<TruncatedMoment> moments;

  std::size_t k() const noexcept { return moments.size(); }
};

// (max d, min u) of windows j and j2; empty when they do not overlap.
std::optional<ThresholdPair> overlap_window(const TruncatedSpec& spec, std::size_t j,
                                            std::size_t j2);

// For windows j, j2 with overlap window O:
//   p(j)        = P(X in window j)
//   p_jj(j,j2)  = P(X in O)
//   mu_y(j)     = E[h_j(X) 1{X in window j}]
//   mu_yy(j,j2) = E[h_j(X) h_j2(X) 1{X in O}]
//   mu_w(j,j2)  = E[h_j(X) 1{X in O}]      (not symmetric)
struct PopulationQuantities {
  Eigen::VectorXd p;
  Eigen::MatrixXd p_jj;
  Eigen::VectorXd mu_y;
  Eigen::MatrixXd mu_yy;
  Eigen::MatrixXd mu_w;

  std::size_t k() const noexcept { return static_cast<std::size_t>(p.size()); }
};

// v-domain integrals int_{F(d)}^{F(u)} g(F^{-1}(v)) dv; throws NumericError when
// the estimated error exceeds 1e-10 max(1, |value|).
PopulationQuantities population_quantities(const DistributionAdapter& F, const TruncatedSpec& spec);

// Population truncated moments mu_j = mu_y(j) / p(j).
Eigen::VectorXd population_moments(const PopulationQuantities& q);

// Covariance of (Y_1..Y_k, Z_1..Z_k), Z_j the window indicator.
Eigen::MatrixXd sigma_v(const PopulationQuantities& q);

// Jacobian of (Y-bar, Z-bar) -> (Y-bar_j / Z-bar_j), k x 2k.
Eigen::MatrixXd d_v(const PopulationQuantities& q);

// Asymptotic covariance (times n) of the truncated sample moments, by the
// elementwise formula and by D_V Sigma_V D_V'. sigma_mu computes both and throws
// NumericError if they disagree by more than 1e-10 relative to the largest entry.
Eigen::MatrixXd sigma_mu_explicit(const PopulationQuantities& q);
Eigen::MatrixXd sigma_mu_product(const PopulationQuantities& q);
Eigen::MatrixXd sigma_mu(const PopulationQuantities& q);

Eigen::MatrixXd propagate_theta(const Eigen::MatrixXd& sigma_mu, const Eigen::MatrixXd& D);

struct AsymptoticReport {
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma_mu;
  std::optional<Eigen::MatrixXd> sigma_theta;
};

// D, when given, is the k x k Jacobian of the inverse map mu -> theta.
AsymptoticReport asymptotic_report(const DistributionAdapter& F, const TruncatedSpec& spec,
                                   const std::optional<Eigen::MatrixXd>& D = std::nullopt);

bool is_symmetric_psd(const Eigen::MatrixXd& m, double tol = 1e-9);

// Empirical truncated moments; throws EmptyWindow(j) for an empty window.
Eigen::VectorXd sample_moment_vector(std::span<const double> data, const TruncatedSpec& spec);

using VectorMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// Central differences with step rel_step * max(1, |x_i|).
Eigen::MatrixXd finite_difference_jacobian(const VectorMap& g, const Eigen::VectorXd& x,
                                           double rel_step = 1e-6);

struct SystemSolution {
  Eigen::VectorXd theta;
  bool converged = false;
  double residual = 0.0;
  int iterations = 0;
};

// Damped Newton iteration for mu_of_theta(theta) = mu_hat from theta0, with a
// finite-difference Jacobian and step halving on residual increase. No global
// guarantee; converged = false carries the final residual.
SystemSolution solve_system(const VectorMap& mu_of_theta, const Eigen::VectorXd& mu_hat,
                            const Eigen::VectorXd& theta0, int max_iter = 100, double tol = 1e-10);

}  // namespace severfit
