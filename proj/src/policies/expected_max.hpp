#pragma once

// E[max_j (a_j + b_j Z)] for a scalar random variable Z, evaluated exactly on
// the upper envelope of the lines:
//
//   E = sum_k  a_k (F(c_k) - F(c_{k-1})) + b_k (G(c_k) - G(c_{k-1}))
//
// where c_k are the envelope breakpoints, F is the CDF of Z and
// G(c) = E[Z; Z <= c] its partial first moment.

#include <cstddef>
#include <span>
#include <vector>

namespace mocu::policies {

struct PencilEnvelope {
  std::vector<std::size_t> lines;   // indices into the pencil, increasing slope
  std::vector<double> breakpoints;  // lines.size() - 1 interior breakpoints
};

/// Upper envelope of a_j + b_j z. Slopes within `tolerance` of each other are
/// treated as parallel and the dominated one is dropped; ties keep the lowest
/// index.
PencilEnvelope upper_envelope(std::span<const double> intercepts, std::span<const double> slopes,
                              double tolerance = 1e-12);

struct StandardNormal {
  double cdf(double c) const;
  double partial_mean(double c) const;  // -phi(c)
};

/// Standard Student-t; the first moment needs dof > 1.
struct StandardStudentT {
  double dof;
  double cdf(double c) const;
  double partial_mean(double c) const;  // -(dof + c^2)/(dof - 1) f(c)
};

/// E[max_j(a_j + b_j Z)] - max_j a_j, Z ~ N(0,1). Computed on shifted
/// intercepts, so it stays accurate when the intercepts are large.
double expected_max_affine_excess(std::span<const double> intercepts,
                                  std::span<const double> slopes);
double expected_max_affine(std::span<const double> intercepts, std::span<const double> slopes);

/// Same with Z ~ t(dof). Returns +infinity when dof <= 1 and the slopes are
/// not all equal (the expectation diverges).
double expected_max_affine_t(std::span<const double> intercepts, std::span<const double> slopes,
                             double dof);
double expected_max_affine_t_excess(std::span<const double> intercepts, std::span<const double> slopes,
                                    double dof);

}  // namespace mocu::policies
