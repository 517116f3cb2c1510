#include "policies/kg.hpp"

#include <cmath>

#include "core/error.hpp"
#include "policies/expected_max.hpp"

namespace mocu::policies {

LinePencil kg_pencil(const beliefs::CorrelatedGaussianBelief& belief, std::size_t experiment,
                     const std::vector<std::size_t>& actions) {
  if (experiment >= belief.size()) fail(ErrorCode::kDomain, "experiment index out of range");
  const auto i = static_cast<Eigen::Index>(experiment);
  const double denom = belief.noise()[i] + belief.covariance()(i, i);
  LinePencil p;
  auto add = [&](std::size_t j) {
    const auto jj = static_cast<Eigen::Index>(j);
    p.intercepts.push_back(belief.mean()[jj]);
    p.slopes.push_back(denom > 0.0 ? belief.covariance()(jj, i) / std::sqrt(denom) : 0.0);
  };
  if (actions.empty()) {
    for (std::size_t j = 0; j < belief.size(); ++j) add(j);
  } else {
    for (std::size_t j : actions) {
      if (j >= belief.size()) fail(ErrorCode::kDomain, "action index out of range");
      add(j);
    }
  }
  return p;
}

double kg_value(const beliefs::CorrelatedGaussianBelief& belief, std::size_t experiment) {
  const LinePencil p = kg_pencil(belief, experiment);
  return expected_max_affine_excess(p.intercepts, p.slopes);
}

double kg_value(const beliefs::IndependentGaussianBelief& belief, std::size_t experiment) {
  return kg_value(beliefs::CorrelatedGaussianBelief::from_independent(belief), experiment);
}

KgDecision kg_policy(const beliefs::CorrelatedGaussianBelief& belief) {
  KgDecision d;
  d.values.resize(belief.size());
  for (std::size_t i = 0; i < belief.size(); ++i) {
    d.values[i] = kg_value(belief, i);
    if (d.values[i] > d.values[d.experiment]) d.experiment = i;
  }
  return d;
}

}  // namespace mocu::policies
