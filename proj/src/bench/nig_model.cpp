#include "bench/nig_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/error.hpp"
#include "policies/expected_max.hpp"

namespace mocu::bench {

NigQuadraticModel::NigQuadraticModel(std::vector<double> grid, bool exact_lookahead, bool common_outcomes)
    : grid_(std::move(grid)), exact_(exact_lookahead), common_(common_outcomes) {
  if (grid_.empty()) fail(ErrorCode::kDomain, "empty action grid");
}

std::vector<double> NigQuadraticModel::expected_costs(const Belief& b, const core::EvalContext&) const {
  const beliefs::Vector3 m = b.plug_in_coefficients();
  std::vector<double> out;
  out.reserve(grid_.size());
  for (double psi : grid_) out.push_back(-beliefs::quadratic_basis(psi).dot(m));
  return out;
}

core::Estimate NigQuadraticModel::expected_optimal_cost(const Belief& b, const core::EvalContext& ctx) const {
  if (!b.proper()) {
    const auto c = expected_costs(b, ctx);
    return {*std::min_element(c.begin(), c.end()), 0.0};
  }
  Rng rng = ctx.theta_rng();
  const std::size_t n = ctx.config().mc_theta_samples;
  double s = 0.0, s2 = 0.0;
  for (const auto& t : beliefs::nig_sample_theta(b, n, rng)) {
    double best = -std::numeric_limits<double>::infinity();
    for (double psi : grid_) best = std::max(best, t[0] * psi * psi + t[1] * psi + t[2]);
    s += best;
    s2 += best * best;
  }
  const double mean = s / static_cast<double>(n);
  const double var = n > 1 ? std::max(0.0, s2 / static_cast<double>(n) - mean * mean) * static_cast<double>(n) /
                                 static_cast<double>(n - 1)
                           : 0.0;
  return {-mean, std::sqrt(var / static_cast<double>(n))};
}

core::OutcomeSet<double> NigQuadraticModel::outcomes(const Belief& b, std::size_t experiment,
                                                     const core::EvalContext& ctx) const {
  const beliefs::StudentT pred = beliefs::nig_predictive(b, grid_.at(experiment));
  // Every candidate shares the same predictive dof, so common draws give each
  // candidate the same standardized outcomes.
  Rng rng = ctx.outcome_rng(common_ ? experiment_count() : experiment);
  const std::size_t n = ctx.config().mc_outcome_samples;
  core::OutcomeSet<double> out;
  out.exact = false;
  for (std::size_t k = 0; k < n; ++k) out.items.push_back({beliefs::sample_student_t(pred, rng), 1.0 / static_cast<double>(n)});
  return out;
}

NigQuadraticModel::Belief NigQuadraticModel::update(const Belief& b, std::size_t experiment, double outcome) const {
  return beliefs::nig_update(b, grid_.at(experiment), outcome);
}

std::optional<double> NigQuadraticModel::lookahead_reduction(const Belief& b, std::size_t experiment,
                                                             const core::EvalContext&) const {
  if (!exact_ || !b.proper() || !(2.0 * b.shape() > 1.0)) return std::nullopt;
  const beliefs::AffinePencil p = beliefs::nig_lookahead_pencil(b, grid_.at(experiment), grid_);
  return -policies::expected_max_affine_t_excess(p.intercepts, p.slopes, 2.0 * b.shape());
}

}  // namespace mocu::bench
