#pragma once

// Gaussian reward beliefs for ranking and selection: independent per-action
// normals, or one joint normal over all action rewards.

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

namespace mocu::beliefs {

struct IndependentGaussianBelief {
  std::vector<double> means;
  std::vector<double> variances;  // beta
  std::vector<double> noise;      // lambda, observation noise variance

  std::size_t size() const noexcept { return means.size(); }
  void validate() const;
};

/// Precision-weighted conjugate update of one action; the others are untouched.
IndependentGaussianBelief gaussian_update_independent(const IndependentGaussianBelief& belief,
                                                      std::size_t action, double observation);

class CorrelatedGaussianBelief {
 public:
  CorrelatedGaussianBelief() = default;
  CorrelatedGaussianBelief(Eigen::VectorXd mean, Eigen::MatrixXd covariance, Eigen::VectorXd noise);

  static CorrelatedGaussianBelief from_independent(const IndependentGaussianBelief& belief);

  std::size_t size() const noexcept { return static_cast<std::size_t>(mean_.size()); }
  const Eigen::VectorXd& mean() const noexcept { return mean_; }
  const Eigen::MatrixXd& covariance() const noexcept { return cov_; }
  const Eigen::VectorXd& noise() const noexcept { return noise_; }
  Eigen::VectorXd variances() const { return cov_.diagonal(); }

  /// Copy with a different noise vector (e.g. a noise-free view of the same
  /// prior).
  CorrelatedGaussianBelief with_noise(Eigen::VectorXd noise) const;

 private:
  struct Unchecked {};
  CorrelatedGaussianBelief(Unchecked, Eigen::VectorXd mean, Eigen::MatrixXd covariance,
                           Eigen::VectorXd noise)
      : mean_(std::move(mean)), cov_(std::move(covariance)), noise_(std::move(noise)) {}
  friend CorrelatedGaussianBelief gaussian_update_correlated(const CorrelatedGaussianBelief&,
                                                             std::size_t, double);

  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
  Eigen::VectorXd noise_;
};

/// Rank-one conditioning on y = theta_i + eps, eps ~ N(0, lambda_i).
CorrelatedGaussianBelief gaussian_update_correlated(const CorrelatedGaussianBelief& belief,
                                                    std::size_t action, double observation);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Eigen::MatrixXd& symmetric);

}  // namespace mocu::beliefs
