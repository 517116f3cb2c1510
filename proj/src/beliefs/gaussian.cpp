#include "beliefs/gaussian.hpp"

#include <cmath>
#include <string>

#include "core/error.hpp"

namespace mocu::beliefs {

namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) fail(ErrorCode::kDomain, std::string("non-finite ") + what);
}

}  // namespace

void IndependentGaussianBelief::validate() const {
  if (means.empty()) fail(ErrorCode::kDomain, "empty Gaussian belief");
  if (variances.size() != means.size() || noise.size() != means.size())
    fail(ErrorCode::kDomain, "Gaussian belief vectors differ in length");
  for (std::size_t i = 0; i < means.size(); ++i) {
    require_finite(means[i], "mean");
    require_finite(variances[i], "variance");
    require_finite(noise[i], "noise variance");
    if (variances[i] < 0.0 || noise[i] < 0.0)
      fail(ErrorCode::kDomain, "variances must be nonnegative");
  }
}

IndependentGaussianBelief gaussian_update_independent(const IndependentGaussianBelief& belief,
                                                      std::size_t action, double observation) {
  belief.validate();
  if (action >= belief.size()) fail(ErrorCode::kDomain, "action index out of range");
  require_finite(observation, "observation");
  IndependentGaussianBelief out = belief;
  const double m = belief.means[action];
  const double beta = belief.variances[action];
  const double lambda = belief.noise[action];
  if (beta + lambda <= 0.0) {
    if (observation != m)
      fail(ErrorCode::kInconsistentObservation,
           "observation contradicts a known reward at action " + std::to_string(action));
    return out;
  }
  if (lambda == 0.0) {
    out.means[action] = observation;
    out.variances[action] = 0.0;
  } else if (beta == 0.0) {
    // known reward, noisy look: nothing to learn
  } else {
    const double precision = 1.0 / beta + 1.0 / lambda;
    out.means[action] = (m / beta + observation / lambda) / precision;
    out.variances[action] = 1.0 / precision;
  }
  return out;
}

double min_eigenvalue(const Eigen::MatrixXd& symmetric) {
  if (symmetric.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetric, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

CorrelatedGaussianBelief::CorrelatedGaussianBelief(Eigen::VectorXd mean, Eigen::MatrixXd covariance,
                                                   Eigen::VectorXd noise)
    : mean_(std::move(mean)), cov_(std::move(covariance)), noise_(std::move(noise)) {
  const Eigen::Index n = mean_.size();
  if (n == 0) fail(ErrorCode::kDomain, "empty Gaussian belief");
  if (cov_.rows() != n || cov_.cols() != n || noise_.size() != n)
    fail(ErrorCode::kDomain, "Gaussian belief dimensions disagree");
  if (!mean_.allFinite() || !cov_.allFinite() || !noise_.allFinite())
    fail(ErrorCode::kDomain, "non-finite Gaussian belief");
  if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    fail(ErrorCode::kDomain, "covariance is not symmetric");
  if ((noise_.array() < 0.0).any()) fail(ErrorCode::kDomain, "noise variances must be nonnegative");
  if (min_eigenvalue(cov_) < -1e-10) fail(ErrorCode::kDomain, "covariance is not PSD");
}

CorrelatedGaussianBelief CorrelatedGaussianBelief::from_independent(
    const IndependentGaussianBelief& belief) {
  belief.validate();
  const auto n = static_cast<Eigen::Index>(belief.size());
  Eigen::VectorXd m(n), beta(n), lambda(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m[i] = belief.means[i];
    beta[i] = belief.variances[i];
    lambda[i] = belief.noise[i];
  }
  return CorrelatedGaussianBelief(m, beta.asDiagonal(), lambda);
}

CorrelatedGaussianBelief CorrelatedGaussianBelief::with_noise(Eigen::VectorXd noise) const {
  return CorrelatedGaussianBelief(mean_, cov_, std::move(noise));
}

CorrelatedGaussianBelief gaussian_update_correlated(const CorrelatedGaussianBelief& belief,
                                                    std::size_t action, double observation) {
  if (action >= belief.size()) fail(ErrorCode::kDomain, "action index out of range");
  require_finite(observation, "observation");
  const auto i = static_cast<Eigen::Index>(action);
  const double denom = belief.noise()[i] + belief.covariance()(i, i);
  if (denom <= 0.0) {
    if (observation != belief.mean()[i])
      fail(ErrorCode::kInconsistentObservation,
           "observation contradicts a known reward at action " + std::to_string(action));
    return belief;
  }
  const Eigen::VectorXd column = belief.covariance().col(i);
  Eigen::VectorXd mean = belief.mean() + column * ((observation - belief.mean()[i]) / denom);
  Eigen::MatrixXd cov = belief.covariance() - column * column.transpose() / denom;
  cov = 0.5 * (cov + cov.transpose());
  if (belief.noise()[i] == 0.0) {
    // Exact observation: pin the coordinate so later updates see a known reward.
    mean[i] = observation;
    cov.row(i).setZero();
    cov.col(i).setZero();
  }
  return CorrelatedGaussianBelief(CorrelatedGaussianBelief::Unchecked{}, std::move(mean),
                                  std::move(cov), belief.noise());
}

}  // namespace mocu::beliefs
