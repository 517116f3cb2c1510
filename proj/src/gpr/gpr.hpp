#pragma once

// Gaussian process regression with a quadratic mean basis [psi^2, psi, 1],
// squared-exponential kernel and Gaussian observation noise. The basis
// coefficients are profiled out by generalized least squares, so the
// hyperparameters are (log sigma_f, log ell, log sigma_n).

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "beliefs/gaussian.hpp"

namespace mocu::gpr {

struct GprHyper {
  double log_signal_sd = 0.0;
  double log_length = 0.0;
  double log_noise_sd = 0.0;

  Eigen::Vector3d as_vector() const { return {log_signal_sd, log_length, log_noise_sd}; }
  static GprHyper from_vector(const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }
};

struct GprOptions {
  std::size_t restarts = 5;
  std::uint64_t seed = 0;
  // Box on the log hyperparameters; sigma_f and sigma_n are measured in units
  // of the target standard deviation.
  double log_lower = -6.0;
  double log_upper = 6.0;
  double jitter = 1e-9;  // times trace(K)/n, added to the diagonal
};

struct GprPosterior {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;  // latent f, without observation noise
};

class GprModel;
GprPosterior gpr_posterior(const GprModel& model, const std::vector<double>& query);

class GprModel {
 public:
  GprModel() = default;

  double signal_variance() const noexcept { return sf2_; }
  double length_scale() const noexcept { return ell_; }
  double noise_variance() const noexcept { return sn2_; }
  const Eigen::Vector3d& beta() const noexcept { return beta_; }
  const GprHyper& hyper() const noexcept { return hyper_; }
  double jitter() const noexcept { return jitter_; }
  const std::vector<double>& points() const noexcept { return x_; }
  const std::vector<double>& targets() const noexcept { return y_; }
  double log_likelihood() const noexcept { return loglik_; }

 private:
  friend GprModel gpr_make(const std::vector<double>&, const std::vector<double>&, const GprHyper&,
                           double);
  friend GprPosterior gpr_posterior(const GprModel&, const std::vector<double>&);

  std::vector<double> x_, y_;
  GprHyper hyper_;
  double sf2_ = 1.0, ell_ = 1.0, sn2_ = 0.0, jitter_ = 1e-9, loglik_ = 0.0;
  Eigen::Vector3d beta_ = Eigen::Vector3d::Zero();
  Eigen::MatrixXd chol_;   // lower factor of K + sn2 I + jitter
  Eigen::VectorXd alpha_;  // K^{-1} (y - Phi beta)
};

/// Log marginal likelihood with beta at its GLS optimum; optionally the
/// gradient with respect to the three log hyperparameters. Returns -infinity
/// when the kernel matrix cannot be factored.
double gpr_log_likelihood(const std::vector<double>& points, const std::vector<double>& targets,
                          const GprHyper& hyper, Eigen::Vector3d* gradient = nullptr,
                          double jitter = 1e-9);

/// Model at fixed hyperparameters.
GprModel gpr_make(const std::vector<double>& points, const std::vector<double>& targets,
                  const GprHyper& hyper, double jitter = 1e-9);

/// Maximizes the marginal likelihood by Nelder-Mead from `restarts` seeded
/// starting points. Needs >= 4 points with >= 3 distinct values.
GprModel gpr_fit(const std::vector<double>& points, const std::vector<double>& targets,
                 const GprOptions& options = {});

/// Posterior over `grid` as a correlated reward belief with lambda = sigma_n^2.
/// Round-off negative eigenvalues are clipped to zero.
beliefs::CorrelatedGaussianBelief gpr_belief(const GprModel& model, const std::vector<double>& grid);

struct GradientCheckReport {
  Eigen::Vector3d analytic = Eigen::Vector3d::Zero();
  Eigen::Vector3d numeric = Eigen::Vector3d::Zero();
  double max_relative_error = 0.0;  // |a - n| / max(|a|, |n|, 1e-2)
  bool passed = false;
};

GradientCheckReport gpr_loglik_gradient_check(const std::vector<double>& points,
                                              const std::vector<double>& targets,
                                              const GprHyper& hyper, double step = 1e-5,
                                              double tolerance = 1e-4);
GradientCheckReport gpr_loglik_gradient_check(const GprModel& model, double step = 1e-5,
                                              double tolerance = 1e-4);

}  // namespace mocu::gpr
