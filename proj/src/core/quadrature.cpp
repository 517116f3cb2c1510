#include "core/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <mutex>

#include "core/error.hpp"

namespace mocu::core {

QuadratureRule gauss_hermite_normal(std::size_t order) {
  if (order == 0) fail(ErrorCode::kDomain, "quadrature order must be >= 1");
  static std::mutex mutex;
  static std::map<std::size_t, QuadratureRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  if (auto it = cache.find(order); it != cache.end()) return it->second;

  // Golub-Welsch on the Jacobi matrix of the probabilists' Hermite polynomials.
  const auto n = static_cast<Eigen::Index>(order);
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 1; i < n; ++i) {
    const double off = std::sqrt(static_cast<double>(i));
    jacobi(i, i - 1) = off;
    jacobi(i - 1, i) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  QuadratureRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    rule.nodes[i] = es.eigenvalues()[i];
    const double v0 = es.eigenvectors()(0, i);
    rule.weights[i] = v0 * v0;
    total += rule.weights[i];
  }
  for (double& w : rule.weights) w /= total;
  cache.emplace(order, rule);
  return rule;
}

}  // namespace mocu::core
