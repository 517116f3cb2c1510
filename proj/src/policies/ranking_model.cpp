#include "policies/ranking_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "core/error.hpp"
#include "core/quadrature.hpp"
#include "policies/expected_max.hpp"
#include "policies/kg.hpp"

namespace mocu::policies {

RankingState RankingState::unobserved(beliefs::CorrelatedGaussianBelief g) {
  RankingState s{std::move(g), {}};
  s.observed.assign(s.gaussian.size(), false);
  return s;
}

RankingState RankingState::conditioned(const beliefs::CorrelatedGaussianBelief& prior,
                                       const ObservedSet& observed) {
  observed.validate(prior.size());
  RankingState s = unobserved(prior.with_noise(Eigen::VectorXd::Zero(
      static_cast<Eigen::Index>(prior.size()))));
  for (std::size_t k = 0; k < observed.indices.size(); ++k) {
    s.gaussian = beliefs::gaussian_update_correlated(s.gaussian, observed.indices[k],
                                                     observed.rewards[k]);
    s.observed[observed.indices[k]] = true;
  }
  return s;
}

ObservedSet RankingState::observed_set() const {
  ObservedSet o;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (!observed[i]) continue;
    o.indices.push_back(i);
    o.rewards.push_back(gaussian.mean()[static_cast<Eigen::Index>(i)]);
  }
  return o;
}

GaussianRankingModel::GaussianRankingModel(std::size_t action_count, Mode mode, Lookahead lookahead,
                                           std::size_t quadrature_order)
    : count_(action_count), mode_(mode), lookahead_(lookahead), order_(quadrature_order) {
  if (count_ == 0) fail(ErrorCode::kDomain, "empty action set");
}

std::vector<double> GaussianRankingModel::expected_costs(const Belief& b,
                                                         const core::EvalContext&) const {
  std::vector<double> out(count_);
  for (std::size_t i = 0; i < count_; ++i) out[i] = -b.gaussian.mean()[static_cast<Eigen::Index>(i)];
  return out;
}

core::Estimate GaussianRankingModel::expected_optimal_cost(const Belief& b,
                                                           const core::EvalContext& ctx) const {
  const auto n = static_cast<Eigen::Index>(count_);
  // Factor with an eigen-decomposition so PSD (rank-deficient) covariances work.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b.gaussian.covariance());
  const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd factor = es.eigenvectors() * root.asDiagonal();
  Rng rng = ctx.theta_rng();
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t samples = ctx.config().mc_theta_samples;
  double sum = 0.0, sum_sq = 0.0;
  Eigen::VectorXd z(n);
  for (std::size_t k = 0; k < samples; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) z[i] = normal(rng);
    const double c = -(b.gaussian.mean() + factor * z).maxCoeff();
    sum += c;
    sum_sq += c * c;
  }
  const double m = sum / static_cast<double>(samples);
  double se = 0.0;
  if (samples > 1) {
    const double var = std::max(0.0, (sum_sq - static_cast<double>(samples) * m * m) /
                                         static_cast<double>(samples - 1));
    se = std::sqrt(var / static_cast<double>(samples));
  }
  return {m, se};
}

core::OutcomeSet<double> GaussianRankingModel::outcomes(const Belief& b, std::size_t experiment,
                                                        const core::EvalContext&) const {
  const auto i = static_cast<Eigen::Index>(experiment);
  const double sd = std::sqrt(std::max(0.0, b.gaussian.covariance()(i, i) + b.gaussian.noise()[i]));
  core::OutcomeSet<double> out;
  if (sd == 0.0) {
    out.items.push_back({b.gaussian.mean()[i], 1.0});
    return out;
  }
  const core::QuadratureRule rule = core::gauss_hermite_normal(order_);
  for (std::size_t q = 0; q < rule.nodes.size(); ++q)
    out.items.push_back({b.gaussian.mean()[i] + sd * rule.nodes[q], rule.weights[q]});
  return out;
}

RankingState GaussianRankingModel::update(const Belief& b, std::size_t experiment,
                                          double outcome) const {
  RankingState s{beliefs::gaussian_update_correlated(b.gaussian, experiment, outcome), b.observed};
  s.observed.at(experiment) = true;
  return s;
}

std::vector<std::size_t> GaussianRankingModel::allowed_actions(const Belief& b) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < count_; ++i)
    if (mode_ == Mode::kAllActions || b.observed[i]) out.push_back(i);
  return out;
}

std::vector<std::size_t> GaussianRankingModel::allowed_experiments(const Belief& b) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < count_; ++i)
    if (mode_ == Mode::kAllActions || !b.observed[i]) out.push_back(i);
  return out;
}

std::optional<double> GaussianRankingModel::lookahead_reduction(const Belief& b,
                                                                std::size_t experiment,
                                                                const core::EvalContext&) const {
  if (lookahead_ != Lookahead::kClosedForm) return std::nullopt;
  // Actions available to the posterior IBR decision after measuring `experiment`.
  std::vector<std::size_t> actions;
  for (std::size_t i = 0; i < count_; ++i)
    if (mode_ == Mode::kAllActions || b.observed[i] || i == experiment) actions.push_back(i);
  const LinePencil p = kg_pencil(b.gaussian, experiment, actions);
  const double excess = expected_max_affine_excess(p.intercepts, p.slopes);
  const double top = *std::max_element(p.intercepts.begin(), p.intercepts.end());
  double current = -std::numeric_limits<double>::infinity();
  for (std::size_t a : allowed_actions(b))
    current = std::max(current, b.gaussian.mean()[static_cast<Eigen::Index>(a)]);
  return -(excess + (top - current));
}

}  // namespace mocu::policies
