#pragma once

// Discrete (atom) beliefs and the generic problem bundle: action set,
// experiment set with outcome likelihoods, and a cost oracle.

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "core/engine.hpp"

namespace mocu::core {

using ThetaPoint = std::vector<double>;

class DiscreteBelief {
 public:
  DiscreteBelief() = default;
  /// Weights are normalized on construction; they must be nonnegative with a
  /// positive sum.
  DiscreteBelief(std::vector<ThetaPoint> atoms, std::vector<double> weights);
  DiscreteBelief(std::shared_ptr<const std::vector<ThetaPoint>> atoms, std::vector<double> weights);

  static DiscreteBelief point_mass(ThetaPoint theta);
  static DiscreteBelief uniform(std::vector<ThetaPoint> atoms);

  std::size_t size() const noexcept { return weights_.size(); }
  std::size_t dimension() const noexcept { return atoms_->empty() ? 0 : atoms_->front().size(); }
  const ThetaPoint& atom(std::size_t i) const { return (*atoms_)[i]; }
  double weight(std::size_t i) const { return weights_[i]; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::shared_ptr<const std::vector<ThetaPoint>>& atoms() const noexcept { return atoms_; }
  double effective_sample_size() const;

  /// Same atoms, new (unnormalized) weights.
  DiscreteBelief reweighted(std::vector<double> weights) const;

 private:
  std::shared_ptr<const std::vector<ThetaPoint>> atoms_ =
      std::make_shared<const std::vector<ThetaPoint>>();
  std::vector<double> weights_;
};

struct ActionSet {
  std::size_t count = 0;
  std::vector<std::string> labels;  // optional

  static ActionSet of_size(std::size_t n) { return ActionSet{n, {}}; }
};

using CostOracle = std::function<double(const ThetaPoint&, std::size_t action)>;

/// Likelihood descriptor of one experiment. Finite experiments list their
/// outcome values and a probability table; continuous ones provide a sampler
/// and a log-density.
struct Experiment {
  std::string label;
  std::vector<double> support;
  std::function<double(const ThetaPoint&, std::size_t outcome_index)> probability;
  std::function<double(const ThetaPoint&, Rng&)> sample;
  std::function<double(const ThetaPoint&, double)> log_density;

  bool is_finite() const noexcept { return !support.empty(); }

  static Experiment finite(std::vector<double> support,
                           std::function<double(const ThetaPoint&, std::size_t)> probability,
                           std::string label = {});
  static Experiment continuous(std::function<double(const ThetaPoint&, Rng&)> sample,
                               std::function<double(const ThetaPoint&, double)> log_density,
                               std::string label = {});

  /// Index of `outcome` in a finite support, or throws a domain error.
  std::size_t outcome_index(double outcome) const;
};

using ExperimentSet = std::vector<Experiment>;

struct DesignProblem {
  ActionSet actions;
  ExperimentSet experiments;
  CostOracle cost;
};

// Building blocks used in fixtures and tests.

/// Reveals theta[coordinate] exactly (outcomes 0/1 for a binary coordinate).
Experiment perfect_binary_experiment(std::size_t coordinate);
/// Reports theta[coordinate], flipped with probability delta.
Experiment noisy_binary_experiment(std::size_t coordinate, double delta);
/// Single-outcome experiment: the posterior always equals the prior.
Experiment uninformative_experiment();
/// Cost oracle backed by a table indexed by (atom, action); atoms are looked up
/// by exact value. Unknown atoms raise a domain error.
CostOracle cost_table(const std::vector<ThetaPoint>& atoms, std::vector<std::vector<double>> table);

// Direct evaluation on discrete beliefs (exact sums).
double expected_cost(const DiscreteBelief& belief, const CostOracle& cost, std::size_t action);
std::size_t ibr_action(const DiscreteBelief& belief, const ActionSet& actions,
                       const CostOracle& cost);
double mocu(const DiscreteBelief& belief, const ActionSet& actions, const CostOracle& cost);

/// Monte-Carlo MOCU over `samples` theta draws from the belief; the IBR action
/// is chosen on the same draws.
Estimate mocu_monte_carlo(const DiscreteBelief& belief, const ActionSet& actions,
                          const CostOracle& cost, std::size_t samples, Rng& rng);

struct ParticleUpdateOptions {
  /// Posterior effective sample size below this raises a degeneracy error.
  /// 1.0 disables the check (ESS >= 1 always).
  double min_effective_sample_size = 1.0;
};

/// Bayes update of an atom belief. Finite experiments use the exact outcome
/// probabilities; continuous ones reweight by the likelihood in log space.
DiscreteBelief posterior(const DiscreteBelief& belief, const Experiment& experiment, double outcome,
                         const ParticleUpdateOptions& options = {});

/// Engine model over a DesignProblem with discrete beliefs. Costs and finite
/// likelihoods are tabulated once for the atom set given at construction;
/// beliefs over other atom sets fall back to calling the oracle.
class DiscreteModel {
 public:
  using Belief = DiscreteBelief;
  using Outcome = double;

  DiscreteModel(DesignProblem problem, const DiscreteBelief& support,
                ParticleUpdateOptions options = {});

  std::size_t action_count() const noexcept { return problem_.actions.count; }
  std::size_t experiment_count() const noexcept { return problem_.experiments.size(); }
  const DesignProblem& problem() const noexcept { return problem_; }

  std::vector<double> expected_costs(const Belief& b, const EvalContext& ctx) const;
  Estimate expected_optimal_cost(const Belief& b, const EvalContext& ctx) const;
  OutcomeSet<double> outcomes(const Belief& b, std::size_t experiment, const EvalContext& ctx) const;
  Belief update(const Belief& b, std::size_t experiment, double outcome) const;

  /// Prior-predictive probability of each support value of a finite experiment.
  std::vector<double> predictive(const Belief& b, std::size_t experiment) const;

 private:
  double cost(const Belief& b, std::size_t atom, std::size_t action) const;

  DesignProblem problem_;
  std::shared_ptr<const std::vector<ThetaPoint>> atoms_;
  std::vector<std::vector<double>> costs_;  // [atom][action]
  ParticleUpdateOptions options_;
};

}  // namespace mocu::core
