#pragma once

// Shared generators and independent oracles for the unit suites.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "core/discrete.hpp"

namespace testing {

using mocu::core::ThetaPoint;

/// Atom k is encoded as theta = {k}; costs come from a dense table.
struct RandomDiscreteProblem {
  std::vector<ThetaPoint> atoms;
  std::vector<double> prior;
  std::vector<std::vector<double>> cost;                       // [atom][action]
  std::vector<std::vector<std::vector<double>>> likelihoods;   // [exp][atom][outcome]

  mocu::core::DesignProblem problem() const {
    mocu::core::DesignProblem p;
    p.actions = mocu::core::ActionSet::of_size(cost.front().size());
    auto table = cost;
    p.cost = [table](const ThetaPoint& t, std::size_t a) {
      return table[static_cast<std::size_t>(t[0])][a];
    };
    for (const auto& lik : likelihoods) {
      std::vector<double> support(lik.front().size());
      for (std::size_t j = 0; j < support.size(); ++j) support[j] = static_cast<double>(j);
      p.experiments.push_back(mocu::core::Experiment::finite(
          support, [lik](const ThetaPoint& t, std::size_t j) {
            return lik[static_cast<std::size_t>(t[0])][j];
          }));
    }
    return p;
  }
  mocu::core::DiscreteBelief belief() const { return {atoms, prior}; }
};

inline RandomDiscreteProblem random_discrete_problem(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n_atoms(1, 6), n_actions(1, 5), n_exps(1, 4), n_out(1, 4);
  std::uniform_real_distribution<double> u(0.0, 1.0), c(-3.0, 5.0);
  RandomDiscreteProblem r;
  const int na = n_atoms(rng), nact = n_actions(rng), ne = n_exps(rng);
  for (int i = 0; i < na; ++i) {
    r.atoms.push_back({static_cast<double>(i)});
    r.prior.push_back(u(rng) + 1e-3);
    std::vector<double> row;
    for (int a = 0; a < nact; ++a) row.push_back(c(rng));
    r.cost.push_back(row);
  }
  double s = 0;
  for (double w : r.prior) s += w;
  for (double& w : r.prior) w /= s;
  for (int e = 0; e < ne; ++e) {
    const int no = n_out(rng);
    std::vector<std::vector<double>> lik;
    for (int i = 0; i < na; ++i) {
      std::vector<double> p(no);
      double t = 0;
      for (double& x : p) t += (x = u(rng) + 1e-3);
      for (double& x : p) x /= t;
      // make the last entry absorb round-off so rows sum to one exactly enough
      double head = 0;
      for (int j = 0; j + 1 < no; ++j) head += p[j];
      p[no - 1] = 1.0 - head;
      lik.push_back(p);
    }
    r.likelihoods.push_back(lik);
  }
  return r;
}

/// Direct enumeration of E_xi[ M(Theta | xi) ] from the tables, without the
/// engine: posterior by Bayes rule, IBR by argmin, MOCU by definition.
inline double brute_force_design_value(const RandomDiscreteProblem& r, std::size_t e) {
  const auto& lik = r.likelihoods[e];
  const std::size_t na = r.atoms.size(), nact = r.cost.front().size(), no = lik.front().size();
  double total = 0.0;
  for (std::size_t j = 0; j < no; ++j) {
    double pj = 0.0;
    for (std::size_t i = 0; i < na; ++i) pj += r.prior[i] * lik[i][j];
    if (pj <= 0.0) continue;
    std::vector<double> post(na);
    for (std::size_t i = 0; i < na; ++i) post[i] = r.prior[i] * lik[i][j] / pj;
    double best = 1e300;
    for (std::size_t a = 0; a < nact; ++a) {
      double ec = 0.0;
      for (std::size_t i = 0; i < na; ++i) ec += post[i] * r.cost[i][a];
      best = std::min(best, ec);
    }
    double emin = 0.0;
    for (std::size_t i = 0; i < na; ++i)
      emin += post[i] * *std::min_element(r.cost[i].begin(), r.cost[i].end());
    total += pj * (best - emin);
  }
  return total;
}

}  // namespace testing
