#pragma once

#include <cstddef>
#include <vector>

namespace mocu::core {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Hermite rule for E[h(Z)], Z ~ N(0, 1) (probabilists' weights, summing
/// to one). Nodes in increasing order.
QuadratureRule gauss_hermite_normal(std::size_t order);

}  // namespace mocu::core
