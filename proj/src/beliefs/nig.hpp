#pragma once

// Normal-inverse-gamma belief for the quadratic reward model
//   y = t1 psi^2 + t2 psi + t3 + eps,  eps ~ N(0, sigma^2)
// with the conjugate update of (mean, precision, shape, scale).

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "core/random.hpp"

namespace mocu::beliefs {

using Vector3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;

/// Basis row [psi^2, psi, 1].
inline Vector3 quadratic_basis(double psi) { return {psi * psi, psi, 1.0}; }

struct NigPrior {
  Vector3 mean = Vector3::Zero();
  Matrix3 precision = Matrix3::Zero();  // V0^{-1}
  double shape = -1.5;                  // a0
  double scale = 0.0;                   // b0

  /// Flat in the coefficients with p(sigma^2) proportional to 1/sigma^2; the
  /// posterior has a_n = (n - 3)/2 and b_n = RSS/2.
  static NigPrior noninformative() { return {}; }
  bool is_noninformative() const { return precision.isZero(0.0) && scale == 0.0; }
};

struct StudentT {
  double location = 0.0;
  double scale = 0.0;
  double dof = 0.0;
};

struct Observation {
  double psi = 0.0;
  double y = 0.0;
};

class NigLinearBelief {
 public:
  explicit NigLinearBelief(NigPrior prior = NigPrior::noninformative());

  std::size_t observation_count() const noexcept { return data_.size(); }
  const std::vector<Observation>& observations() const noexcept { return data_; }
  const NigPrior& prior() const noexcept { return prior_; }

  /// Rank of the design (including the prior precision) at tolerance 1e-9.
  int design_rank() const noexcept { return rank_; }
  bool proper() const noexcept { return proper_; }

  // Posterior parameters; meaningful once proper().
  const Vector3& mean() const noexcept { return mean_; }
  const Matrix3& precision() const noexcept { return precision_; }
  const Matrix3& covariance_factor() const noexcept { return cov_factor_; }  // V_n
  double shape() const noexcept { return shape_; }
  double scale() const noexcept { return scale_; }

  /// Posterior mean while proper, minimum-norm least-squares fit otherwise.
  Vector3 plug_in_coefficients() const;
  double plug_in_reward(double psi) const { return quadratic_basis(psi).dot(plug_in_coefficients()); }

  /// Posterior mean of sigma^2, b/(a-1); requires a > 1.
  double noise_variance_mean() const;

  /// Throws kNotProper unless proper().
  void require_proper() const;

 private:
  friend NigLinearBelief nig_update(const NigLinearBelief&, double, double);
  void recompute();

  NigPrior prior_;
  std::vector<Observation> data_;
  Matrix3 gram_ = Matrix3::Zero();  // X^T X
  Vector3 xty_ = Vector3::Zero();   // X^T y
  Matrix3 precision_ = Matrix3::Zero();
  Matrix3 cov_factor_ = Matrix3::Zero();
  Vector3 mean_ = Vector3::Zero();
  double shape_ = 0.0;
  double scale_ = 0.0;
  int rank_ = 0;
  bool proper_ = false;
};

NigLinearBelief nig_update(const NigLinearBelief& belief, double psi, double y);

/// Draws sigma^2 ~ InvGamma(a_n, b_n), then coefficients ~ N(m_n, sigma^2 V_n).
/// Each draw is [t1, t2, t3, sigma].
std::vector<std::vector<double>> nig_sample_theta(const NigLinearBelief& belief, std::size_t count,
                                                  std::uint64_t seed);
std::vector<std::vector<double>> nig_sample_theta(const NigLinearBelief& belief, std::size_t count,
                                                  Rng& rng);

/// Posterior predictive of y at psi: Student-t with dof 2a_n.
StudentT nig_predictive(const NigLinearBelief& belief, double psi);
double sample_student_t(const StudentT& t, Rng& rng);

/// Posterior-mean rewards on `grid` after one more observation at `psi`, as an
/// affine family intercept + slope * T in the standardized predictive outcome
/// T ~ t(2a_n). The coefficient-mean update does not involve sigma, so this is
/// exact.
struct AffinePencil {
  std::vector<double> intercepts;
  std::vector<double> slopes;
};
AffinePencil nig_lookahead_pencil(const NigLinearBelief& belief, double psi,
                                  const std::vector<double>& grid);

}  // namespace mocu::beliefs
