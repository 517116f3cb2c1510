#pragma once

// Dopant/concentration selection with a given surrogate g(h, r, o) for the
// dissipation energy. Each dopant d_i is characterized by theta_i = (h_i, r_i);
// the belief is a product of per-dopant particle sets, and measuring (d_i, o_j)
// returns Normal(g(h_i, r_i, o_j), tau^2).

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "core/discrete.hpp"
#include "core/engine.hpp"

namespace mocu::surrogate {

using SurrogateFn = std::function<double(double h, double r, double o)>;

/// g = (h - c1 o)^2 + c2 (r - c3)^2 + c4 o
struct QuadraticSurrogate {
  double c1 = 1.0, c2 = 1.0, c3 = 0.5, c4 = 0.1;
  double operator()(double h, double r, double o) const;
};

enum class OutcomeRule { kMonteCarlo, kGaussHermite };

struct SurrogateProblem {
  std::size_t dopants = 0;
  std::vector<double> concentrations;
  SurrogateFn g = QuadraticSurrogate{};
  double tau = 1.0;
  OutcomeRule outcome_rule = OutcomeRule::kMonteCarlo;
  std::size_t quadrature_order = 5;  // per particle; order 1 puts the node at g itself
  /// Posterior ESS below this raises a degeneracy error (1 = off).
  double min_effective_sample_size = 1.0;

  std::size_t pair_count() const noexcept { return dopants * concentrations.size(); }
  std::size_t pair_index(std::size_t dopant, std::size_t conc) const { return dopant * concentrations.size() + conc; }
  void validate() const;
};

/// Particles over (h, r), one set per dopant.
struct SurrogateBelief {
  std::vector<core::DiscreteBelief> dopants;
};

struct Candidate {
  std::size_t dopant = 0, concentration = 0;
  double expected_cost = 0.0;
};

std::vector<core::ThetaPoint> grid_particles(double h_lo, double h_hi, double r_lo, double r_hi,
                                             std::size_t per_axis);
std::vector<core::ThetaPoint> sample_particles(std::size_t count, double h_lo, double h_hi, double r_lo,
                                               double r_hi, Rng& rng);

/// E[g] for every (dopant, concentration), flattened by pair_index.
std::vector<double> expected_costs(const SurrogateProblem& p, const SurrogateBelief& b);
Candidate surrogate_ibr(const SurrogateProblem& p, const SurrogateBelief& b);

/// Reweights dopant i by the likelihood of `outcome`; other dopants are copied.
SurrogateBelief surrogate_update(const SurrogateProblem& p, const SurrogateBelief& b, std::size_t dopant,
                                 std::size_t conc, double outcome);

/// Prior-predictive outcomes of measuring (dopant, conc): MC draws from the
/// particle mixture on the context's substream, or Gauss-Hermite nodes per
/// particle.
core::OutcomeSet<double> predictive_outcomes(const SurrogateProblem& p, const SurrogateBelief& b,
                                             std::size_t dopant, std::size_t conc,
                                             const core::EvalContext& ctx);

struct SurrogateDesign {
  Candidate experiment;
  std::vector<double> values;  // expected post-measurement IBR cost per candidate
  double current_ibr_cost = 0.0;
};

SurrogateDesign surrogate_design_policy(const SurrogateProblem& p, const SurrogateBelief& b,
                                        const core::EvalContext& ctx);

/// Engine adapter: actions and experiments are both (dopant, concentration)
/// pairs in pair_index order.
class SurrogateModel {
 public:
  using Belief = SurrogateBelief;
  using Outcome = double;

  explicit SurrogateModel(SurrogateProblem problem);

  std::size_t action_count() const noexcept { return problem_.pair_count(); }
  std::size_t experiment_count() const noexcept { return problem_.pair_count(); }
  const SurrogateProblem& problem() const noexcept { return problem_; }

  std::vector<double> expected_costs(const Belief& b, const core::EvalContext& ctx) const;
  /// Exact: E[min_i m_i] for independent m_i = min_j g(theta_i, o_j).
  core::Estimate expected_optimal_cost(const Belief& b, const core::EvalContext& ctx) const;
  core::OutcomeSet<double> outcomes(const Belief& b, std::size_t experiment, const core::EvalContext& ctx) const;
  Belief update(const Belief& b, std::size_t experiment, double outcome) const;

 private:
  SurrogateProblem problem_;
};

/// Synthetic ground truth: one (h, r) per dopant drawn from the belief.
std::vector<core::ThetaPoint> sample_truth(const SurrogateBelief& b, Rng& rng);
double measure(const SurrogateProblem& p, const std::vector<core::ThetaPoint>& truth, std::size_t dopant,
               std::size_t conc, Rng& rng);

}  // namespace mocu::surrogate
