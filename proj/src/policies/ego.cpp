#include "policies/ego.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "core/error.hpp"

namespace mocu::policies {

void ObservedSet::validate(std::size_t action_count) const {
  if (indices.size() != rewards.size()) fail(ErrorCode::kDomain, "observed set length mismatch");
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= action_count) fail(ErrorCode::kDomain, "observed action out of range");
    if (!std::isfinite(rewards[k])) fail(ErrorCode::kDomain, "non-finite observed reward");
    for (std::size_t l = 0; l < k; ++l)
      if (indices[l] == indices[k]) fail(ErrorCode::kDomain, "duplicate observed action");
  }
}

bool ObservedSet::contains(std::size_t action) const {
  return std::find(indices.begin(), indices.end(), action) != indices.end();
}

double ObservedSet::best_reward() const {
  if (indices.empty()) fail(ErrorCode::kDomain, "no observed actions");
  return *std::max_element(rewards.begin(), rewards.end());
}

std::size_t ObservedSet::best_action() const {
  if (indices.empty()) fail(ErrorCode::kDomain, "no observed actions");
  std::size_t best = 0;
  for (std::size_t k = 1; k < indices.size(); ++k)
    if (rewards[k] > rewards[best] || (rewards[k] == rewards[best] && indices[k] < indices[best]))
      best = k;
  return indices[best];
}

double expected_improvement(double mu, double s, double f_star) {
  if (!std::isfinite(mu) || !std::isfinite(s) || !std::isfinite(f_star) || s < 0.0)
    fail(ErrorCode::kDomain, "invalid expected-improvement arguments");
  const double d = mu - f_star;
  if (s == 0.0) return std::max(d, 0.0);
  const double z = d / s;
  const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  return d * cdf + s * pdf;
}

double ei_value(const beliefs::CorrelatedGaussianBelief& belief, std::size_t candidate,
                const ObservedSet& observed) {
  observed.validate(belief.size());
  if (candidate >= belief.size()) fail(ErrorCode::kDomain, "candidate index out of range");
  if (observed.contains(candidate))
    fail(ErrorCode::kDomain, "candidate " + std::to_string(candidate) + " was already observed");
  const auto i = static_cast<Eigen::Index>(candidate);
  const double var = std::max(belief.covariance()(i, i), 0.0);
  return expected_improvement(belief.mean()[i], std::sqrt(var), observed.best_reward());
}

EgoDecision ego_policy(const beliefs::CorrelatedGaussianBelief& belief, const ObservedSet& observed) {
  observed.validate(belief.size());
  if (observed.indices.empty()) fail(ErrorCode::kDomain, "EGO needs at least one observed action");
  if (observed.indices.size() >= belief.size())
    fail(ErrorCode::kExhausted, "every action has been observed");
  EgoDecision d;
  d.best_action = observed.best_action();
  d.values.assign(belief.size(), std::numeric_limits<double>::quiet_NaN());
  bool first = true;
  for (std::size_t i = 0; i < belief.size(); ++i) {
    if (observed.contains(i)) continue;
    d.values[i] = ei_value(belief, i, observed);
    if (first || d.values[i] > d.values[d.experiment]) {
      d.experiment = i;
      first = false;
    }
  }
  return d;
}

}  // namespace mocu::policies
