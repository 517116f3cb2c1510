#pragma once

#include <cstddef>
#include <vector>

#include "beliefs/gaussian.hpp"

namespace mocu::policies {

/// Actions measured so far (noise-free) and their exact rewards.
struct ObservedSet {
  std::vector<std::size_t> indices;
  std::vector<double> rewards;

  void validate(std::size_t action_count) const;
  bool contains(std::size_t action) const;
  double best_reward() const;
  /// argmax over the observed actions of their rewards; lowest action index on ties.
  std::size_t best_action() const;
};

/// E[max(X - f_star, 0)] for X ~ N(mu, s^2).
double expected_improvement(double mu, double s, double f_star);

/// EI of an unobserved candidate under the (already conditioned) belief.
double ei_value(const beliefs::CorrelatedGaussianBelief& belief, std::size_t candidate,
                const ObservedSet& observed);

struct EgoDecision {
  std::size_t experiment = 0;
  std::size_t best_action = 0;  // restricted IBR action over the observed set
  std::vector<double> values;   // EI per action, NaN for observed ones
};

EgoDecision ego_policy(const beliefs::CorrelatedGaussianBelief& belief, const ObservedSet& observed);

}  // namespace mocu::policies
