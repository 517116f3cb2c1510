#pragma once

// The quadratic reward model of the simulation study as a generic design
// model: theta = (t1, t2, t3, sigma) under a normal-inverse-gamma belief,
// C(theta, psi) = -f(theta, psi), and experiment i observes f(theta, psi_i)
// plus N(0, sigma^2) noise.

#include <cstddef>
#include <optional>
#include <vector>

#include "beliefs/nig.hpp"
#include "core/engine.hpp"

namespace mocu::bench {

class NigQuadraticModel {
 public:
  using Belief = beliefs::NigLinearBelief;
  using Outcome = double;

  /// exact_lookahead: use the Student-t envelope whenever the predictive has
  /// a finite mean (dof > 1); otherwise, and when false, sample outcomes.
  /// common_outcomes: sampled outcomes of all candidates come from one
  /// substream (common random numbers across candidates).
  explicit NigQuadraticModel(std::vector<double> grid, bool exact_lookahead = true,
                             bool common_outcomes = true);

  std::size_t action_count() const noexcept { return grid_.size(); }
  std::size_t experiment_count() const noexcept { return grid_.size(); }
  const std::vector<double>& grid() const noexcept { return grid_; }

  /// -posterior mean reward; the least-squares plug-in while improper.
  std::vector<double> expected_costs(const Belief& b, const core::EvalContext& ctx) const;
  /// -E[max_psi f] over mc_theta_samples posterior draws (plug-in while improper).
  core::Estimate expected_optimal_cost(const Belief& b, const core::EvalContext& ctx) const;
  /// mc_outcome_samples draws from the Student-t predictive.
  core::OutcomeSet<double> outcomes(const Belief& b, std::size_t experiment, const core::EvalContext& ctx) const;
  Belief update(const Belief& b, std::size_t experiment, double outcome) const;

  std::optional<double> lookahead_reduction(const Belief& b, std::size_t experiment,
                                            const core::EvalContext& ctx) const;

 private:
  std::vector<double> grid_;
  bool exact_;
  bool common_;
};

}  // namespace mocu::bench
