#include "beliefs/nig.hpp"

#include <cmath>
#include <random>
#include <string>

#include "core/error.hpp"

namespace mocu::beliefs {

NigLinearBelief::NigLinearBelief(NigPrior prior) : prior_(std::move(prior)) {
  if (!prior_.mean.allFinite() || !prior_.precision.allFinite() || !std::isfinite(prior_.shape) ||
      !std::isfinite(prior_.scale))
    fail(ErrorCode::kDomain, "non-finite NIG prior");
  recompute();
}

void NigLinearBelief::recompute() {
  precision_ = prior_.precision + gram_;
  precision_ = 0.5 * (precision_ + precision_.transpose());
  shape_ = prior_.shape + 0.5 * static_cast<double>(data_.size());

  // Rank from the singular values of the stacked design (data rows plus the
  // square root of the prior precision).
  Eigen::MatrixXd stacked(static_cast<Eigen::Index>(data_.size()) + 3, 3);
  for (std::size_t i = 0; i < data_.size(); ++i)
    stacked.row(static_cast<Eigen::Index>(i)) = quadratic_basis(data_[i].psi).transpose();
  stacked.bottomRows(3) = Eigen::SelfAdjointEigenSolver<Matrix3>(prior_.precision).operatorSqrt();
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(stacked).singularValues();
  const double top = sv.maxCoeff();
  rank_ = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (top > 0.0 && sv[i] > 1e-9 * top) ++rank_;

  const bool enough = prior_.is_noninformative() ? data_.size() >= 4 : true;
  proper_ = rank_ == 3 && enough && shape_ > 0.0;
  if (!proper_) {
    mean_ = plug_in_coefficients();
    cov_factor_.setZero();
    scale_ = 0.0;
    return;
  }
  Eigen::LDLT<Matrix3> ldlt(precision_);
  mean_ = ldlt.solve(prior_.precision * prior_.mean + xty_);
  cov_factor_ = ldlt.solve(Matrix3::Identity());
  cov_factor_ = 0.5 * (cov_factor_ + cov_factor_.transpose());
  // b_n = b0 + (RSS + (m_n - m0)' V0^{-1} (m_n - m0)) / 2, summed directly to
  // avoid cancellation in y'y - m'V^{-1}m.
  double rss = 0.0;
  for (const Observation& o : data_) {
    const double r = o.y - quadratic_basis(o.psi).dot(mean_);
    rss += r * r;
  }
  const Vector3 d = mean_ - prior_.mean;
  scale_ = prior_.scale + 0.5 * (rss + d.dot(prior_.precision * d));
}

Vector3 NigLinearBelief::plug_in_coefficients() const {
  if (proper_) return mean_;
  if (data_.empty()) return prior_.mean;
  Eigen::MatrixXd x(static_cast<Eigen::Index>(data_.size()), 3);
  Eigen::VectorXd y(static_cast<Eigen::Index>(data_.size()));
  for (std::size_t i = 0; i < data_.size(); ++i) {
    x.row(static_cast<Eigen::Index>(i)) = quadratic_basis(data_[i].psi).transpose();
    y[static_cast<Eigen::Index>(i)] = data_[i].y;
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(x);
  cod.setThreshold(1e-9);
  return cod.solve(y);
}

double NigLinearBelief::noise_variance_mean() const {
  require_proper();
  if (shape_ <= 1.0) fail(ErrorCode::kDomain, "posterior mean of sigma^2 needs shape > 1");
  return scale_ / (shape_ - 1.0);
}

void NigLinearBelief::require_proper() const {
  if (!proper_)
    fail(ErrorCode::kNotProper, "NIG belief is not yet proper (n=" + std::to_string(data_.size()) +
                                    ", rank=" + std::to_string(rank_) + ")");
}

NigLinearBelief nig_update(const NigLinearBelief& belief, double psi, double y) {
  if (!std::isfinite(psi) || !std::isfinite(y)) fail(ErrorCode::kDomain, "non-finite observation");
  NigLinearBelief out = belief;
  const Vector3 phi = quadratic_basis(psi);
  out.data_.push_back({psi, y});
  out.gram_ += phi * phi.transpose();
  out.xty_ += phi * y;
  out.recompute();
  return out;
}

std::vector<std::vector<double>> nig_sample_theta(const NigLinearBelief& belief, std::size_t count,
                                                  std::uint64_t seed) {
  Rng rng(seed);
  return nig_sample_theta(belief, count, rng);
}

std::vector<std::vector<double>> nig_sample_theta(const NigLinearBelief& belief, std::size_t count,
                                                  Rng& rng) {
  belief.require_proper();
  const Eigen::LLT<Matrix3> llt(belief.covariance_factor());
  if (llt.info() != Eigen::Success) fail(ErrorCode::kNumeric, "V_n is not positive definite");
  const Matrix3 lower = llt.matrixL();
  std::gamma_distribution<double> gamma(belief.shape(), 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::vector<double>> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double sigma2 = belief.scale() > 0.0 ? belief.scale() / gamma(rng) : 0.0;
    const double sigma = std::sqrt(sigma2);
    const Vector3 z(normal(rng), normal(rng), normal(rng));
    const Vector3 beta = belief.mean() + sigma * (lower * z);
    out.push_back({beta[0], beta[1], beta[2], sigma});
  }
  return out;
}

StudentT nig_predictive(const NigLinearBelief& belief, double psi) {
  belief.require_proper();
  const Vector3 phi = quadratic_basis(psi);
  const double leverage = phi.dot(belief.covariance_factor() * phi);
  StudentT t;
  t.location = phi.dot(belief.mean());
  t.dof = 2.0 * belief.shape();
  t.scale = std::sqrt((belief.scale() / belief.shape()) * (1.0 + leverage));
  return t;
}

double sample_student_t(const StudentT& t, Rng& rng) {
  std::student_t_distribution<double> dist(t.dof);
  return t.location + t.scale * dist(rng);
}

AffinePencil nig_lookahead_pencil(const NigLinearBelief& belief, double psi,
                                  const std::vector<double>& grid) {
  belief.require_proper();
  const Vector3 phi = quadratic_basis(psi);
  const Vector3 v_phi = belief.covariance_factor() * phi;
  const double leverage = phi.dot(v_phi);
  const StudentT pred = nig_predictive(belief, psi);
  // m_{n+1} = m_n + V_n phi (y - phi'm_n) / (1 + phi'V_n phi), y - phi'm_n = scale * T.
  const double gain = pred.scale / (1.0 + leverage);
  AffinePencil out;
  out.intercepts.reserve(grid.size());
  out.slopes.reserve(grid.size());
  for (double g : grid) {
    const Vector3 q = quadratic_basis(g);
    out.intercepts.push_back(q.dot(belief.mean()));
    out.slopes.push_back(gain * q.dot(v_phi));
  }
  return out;
}

}  // namespace mocu::beliefs
