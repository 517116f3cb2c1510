#pragma once

// Ranking and selection as a generic design model: theta is the vector of
// action rewards, C(theta, psi) = -theta_psi, and experiment i observes
// theta_i with N(0, lambda_i) noise.

#include <cstddef>
#include <optional>
#include <vector>

#include "beliefs/gaussian.hpp"
#include "core/engine.hpp"
#include "policies/ego.hpp"

namespace mocu::policies {

struct RankingState {
  beliefs::CorrelatedGaussianBelief gaussian;
  std::vector<bool> observed;  // per action; drives the restricted mode

  static RankingState unobserved(beliefs::CorrelatedGaussianBelief g);
  /// Noise-free state conditioned on the observed rewards.
  static RankingState conditioned(const beliefs::CorrelatedGaussianBelief& prior,
                                  const ObservedSet& observed);
  ObservedSet observed_set() const;
};

class GaussianRankingModel {
 public:
  using Belief = RankingState;
  using Outcome = double;

  enum class Mode {
    kAllActions,    // knowledge-gradient setting
    kObservedOnly,  // best action confined to measured actions, remeasuring excluded
  };
  enum class Lookahead {
    kClosedForm,    // exact envelope expectation
    kGaussHermite,  // enumerate predictive outcomes and update the belief
  };

  GaussianRankingModel(std::size_t action_count, Mode mode = Mode::kAllActions,
                       Lookahead lookahead = Lookahead::kClosedForm,
                       std::size_t quadrature_order = 64);

  std::size_t action_count() const noexcept { return count_; }
  std::size_t experiment_count() const noexcept { return count_; }

  std::vector<double> expected_costs(const Belief& b, const core::EvalContext& ctx) const;
  /// -E[max_psi theta_psi] by Monte Carlo over mc_theta_samples joint draws.
  core::Estimate expected_optimal_cost(const Belief& b, const core::EvalContext& ctx) const;
  core::OutcomeSet<double> outcomes(const Belief& b, std::size_t experiment,
                                    const core::EvalContext& ctx) const;
  Belief update(const Belief& b, std::size_t experiment, double outcome) const;

  std::vector<std::size_t> allowed_actions(const Belief& b) const;
  std::vector<std::size_t> allowed_experiments(const Belief& b) const;

  /// -E[max of posterior means over the posterior action set] + current best
  /// mean, via the exact envelope; nullopt in quadrature mode.
  std::optional<double> lookahead_reduction(const Belief& b, std::size_t experiment,
                                            const core::EvalContext& ctx) const;

 private:
  std::size_t count_;
  Mode mode_;
  Lookahead lookahead_;
  std::size_t order_;
};

}  // namespace mocu::policies
