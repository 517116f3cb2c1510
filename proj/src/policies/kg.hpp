#pragma once

#include <cstddef>
#include <vector>

#include "beliefs/gaussian.hpp"

namespace mocu::policies {

struct LinePencil {
  std::vector<double> intercepts;
  std::vector<double> slopes;
};

/// Posterior means after measuring action i, as an affine family in the
/// standardized outcome: a = m, b = Sigma e_i / sqrt(lambda_i + Sigma_ii).
/// `actions` selects (and orders) the lines; empty means all actions.
LinePencil kg_pencil(const beliefs::CorrelatedGaussianBelief& belief, std::size_t experiment,
                     const std::vector<std::size_t>& actions = {});

/// E[max_psi m^{t+1}_psi] - max_psi m^t_psi for measuring action i.
double kg_value(const beliefs::CorrelatedGaussianBelief& belief, std::size_t experiment);
double kg_value(const beliefs::IndependentGaussianBelief& belief, std::size_t experiment);

struct KgDecision {
  std::size_t experiment = 0;
  std::vector<double> values;
};

/// argmax of kg_value, lowest index on ties.
KgDecision kg_policy(const beliefs::CorrelatedGaussianBelief& belief);

}  // namespace mocu::policies
