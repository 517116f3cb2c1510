#include "policies/equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "core/engine.hpp"
#include "policies/kg.hpp"
#include "policies/ranking_model.hpp"

namespace mocu::policies {

namespace {

constexpr double kTieTolerance = 1e-12;

}  // namespace

beliefs::CorrelatedGaussianBelief random_ranking_belief(Rng& rng, std::size_t n, bool noise_free) {
  const auto k = static_cast<Eigen::Index>(n);
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.05, 2.0);
  Eigen::MatrixXd f(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) f(i, j) = z(rng);
  Eigen::MatrixXd s = f * f.transpose() / static_cast<double>(n) + 0.05 * Eigen::MatrixXd::Identity(k, k);
  Eigen::VectorXd m(k), noise(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    m[i] = z(rng);
    noise[i] = noise_free ? 0.0 : u(rng);
  }
  return {m, s, noise};
}

EgoInstance random_ego_instance(Rng& rng, std::size_t n) {
  EgoInstance out;
  out.prior = random_ranking_belief(rng, n, true);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::shuffle(idx.begin(), idx.end(), rng);
  std::uniform_int_distribution<std::size_t> count(1, n - 1);
  const std::size_t k = count(rng);
  const Eigen::LLT<Eigen::MatrixXd> llt(out.prior.covariance());
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::VectorXd draw(static_cast<Eigen::Index>(n));
  for (auto& v : draw) v = z(rng);
  const Eigen::VectorXd truth = out.prior.mean() + llt.matrixL() * draw;
  for (std::size_t j = 0; j < k; ++j) {
    out.observed.indices.push_back(idx[j]);
    out.observed.rewards.push_back(truth[static_cast<Eigen::Index>(idx[j])]);
  }
  return out;
}

Comparison compare_kg(const beliefs::CorrelatedGaussianBelief& belief) {
  const KgDecision kg = kg_policy(belief);
  const GaussianRankingModel model(belief.size());
  const core::Selection sel = core::select_experiment(model, RankingState::unobserved(belief), core::EvalContext{}, false);
  Comparison c{kg.experiment, sel.experiment, 0.0, false};
  for (std::size_t i = 0; i < belief.size(); ++i)
    c.max_value_gap = std::max(c.max_value_gap, std::abs(-sel.reduction[i] - kg.values[i]));
  c.tie = c.classic != c.engine &&
          std::abs(kg.values[c.classic] - kg.values[c.engine]) <= kTieTolerance * (1.0 + std::abs(kg.values[c.classic]));
  return c;
}

Comparison compare_ego(const EgoInstance& instance) {
  const RankingState state = RankingState::conditioned(instance.prior, instance.observed);
  const EgoDecision ego = ego_policy(state.gaussian, instance.observed);
  const GaussianRankingModel model(instance.prior.size(), GaussianRankingModel::Mode::kObservedOnly);
  const core::Selection sel = core::select_experiment(model, state, core::EvalContext{}, false);
  Comparison c{ego.experiment, sel.experiment, 0.0, false};
  for (std::size_t i = 0; i < instance.prior.size(); ++i)
    if (!instance.observed.contains(i))
      c.max_value_gap = std::max(c.max_value_gap, std::abs(-sel.reduction[i] - ego.values[i]));
  const double f = instance.observed.best_reward();
  c.tie = c.classic != c.engine &&
          std::abs(ego.values[c.classic] - ego.values[c.engine]) <= kTieTolerance * (1.0 + std::abs(f));
  return c;
}

}  // namespace mocu::policies
