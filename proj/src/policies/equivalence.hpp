#pragma once

// Side-by-side runs of the classic policies and the generic engine on random
// ranking-and-selection instances.

#include <cstddef>
#include <vector>

#include "beliefs/gaussian.hpp"
#include "core/random.hpp"
#include "policies/ego.hpp"

namespace mocu::policies {

/// Mean ~ N(0, 1), covariance F F'/n + 0.05 I with F standard normal, noise
/// variances ~ U(0.05, 2) (zero when noise_free).
beliefs::CorrelatedGaussianBelief random_ranking_belief(Rng& rng, std::size_t n, bool noise_free);

struct EgoInstance {
  beliefs::CorrelatedGaussianBelief prior;  // noise free
  ObservedSet observed;                     // rewards drawn from the prior
};

/// Observes between 1 and n - 1 actions.
EgoInstance random_ego_instance(Rng& rng, std::size_t n);

struct Comparison {
  std::size_t classic = 0;   // KG or EGO choice
  std::size_t engine = 0;    // generic MOCU choice
  double max_value_gap = 0;  // over experiments, classic value vs engine reduction
  bool tie = false;          // choices differ but their values coincide
  bool agree() const noexcept { return classic == engine || tie; }
};

Comparison compare_kg(const beliefs::CorrelatedGaussianBelief& belief);
Comparison compare_ego(const EgoInstance& instance);

}  // namespace mocu::policies
