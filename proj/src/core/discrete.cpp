#include "core/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace mocu::core {

namespace {

std::string describe(const ThetaPoint& theta) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < theta.size(); ++i) os << (i ? "," : "") << theta[i];
  os << ')';
  return os.str();
}

std::vector<double> normalized(std::vector<double> w) {
  double total = 0.0;
  for (double x : w) {
    if (!(x >= 0.0) || !std::isfinite(x)) fail(ErrorCode::kDomain, "belief weights must be finite and nonnegative");
    total += x;
  }
  if (!(total > 0.0)) fail(ErrorCode::kDomain, "belief weights sum to zero");
  for (double& x : w) x /= total;
  return w;
}

void check_atoms(const std::vector<ThetaPoint>& atoms) {
  if (atoms.empty()) fail(ErrorCode::kDomain, "belief has no atoms");
  const std::size_t dim = atoms.front().size();
  for (const ThetaPoint& a : atoms) {
    if (a.size() != dim) fail(ErrorCode::kDomain, "atoms differ in dimension");
    for (double v : a)
      if (!std::isfinite(v)) fail(ErrorCode::kDomain, "non-finite atom " + describe(a));
  }
}

}  // namespace

DiscreteBelief::DiscreteBelief(std::vector<ThetaPoint> atoms, std::vector<double> weights)
    : DiscreteBelief(std::make_shared<const std::vector<ThetaPoint>>(std::move(atoms)),
                     std::move(weights)) {}

DiscreteBelief::DiscreteBelief(std::shared_ptr<const std::vector<ThetaPoint>> atoms,
                               std::vector<double> weights)
    : atoms_(std::move(atoms)) {
  if (!atoms_) fail(ErrorCode::kDomain, "belief has no atoms");
  check_atoms(*atoms_);
  if (weights.size() != atoms_->size()) fail(ErrorCode::kDomain, "atom/weight count mismatch");
  weights_ = normalized(std::move(weights));
}

DiscreteBelief DiscreteBelief::point_mass(ThetaPoint theta) {
  return DiscreteBelief(std::vector<ThetaPoint>{std::move(theta)}, {1.0});
}

DiscreteBelief DiscreteBelief::uniform(std::vector<ThetaPoint> atoms) {
  std::vector<double> w(atoms.size(), 1.0);
  return DiscreteBelief(std::move(atoms), std::move(w));
}

double DiscreteBelief::effective_sample_size() const {
  double s = 0.0;
  for (double w : weights_) s += w * w;
  return 1.0 / s;
}

DiscreteBelief DiscreteBelief::reweighted(std::vector<double> weights) const {
  return DiscreteBelief(atoms_, std::move(weights));
}

Experiment Experiment::finite(std::vector<double> support,
                              std::function<double(const ThetaPoint&, std::size_t)> probability,
                              std::string label) {
  if (support.empty()) fail(ErrorCode::kDomain, "finite experiment needs a nonempty support");
  Experiment e;
  e.label = std::move(label);
  e.support = std::move(support);
  e.probability = std::move(probability);
  return e;
}

Experiment Experiment::continuous(std::function<double(const ThetaPoint&, Rng&)> sample,
                                  std::function<double(const ThetaPoint&, double)> log_density,
                                  std::string label) {
  Experiment e;
  e.label = std::move(label);
  e.sample = std::move(sample);
  e.log_density = std::move(log_density);
  return e;
}

std::size_t Experiment::outcome_index(double outcome) const {
  for (std::size_t j = 0; j < support.size(); ++j)
    if (support[j] == outcome) return j;
  std::ostringstream os;
  os << "outcome " << outcome << " is outside the support of experiment '" << label << "'";
  fail(ErrorCode::kDomain, os.str());
}

Experiment perfect_binary_experiment(std::size_t coordinate) {
  return noisy_binary_experiment(coordinate, 0.0);
}

Experiment noisy_binary_experiment(std::size_t coordinate, double delta) {
  if (!(delta >= 0.0 && delta <= 1.0)) fail(ErrorCode::kDomain, "delta must lie in [0, 1]");
  return Experiment::finite(
      {0.0, 1.0},
      [coordinate, delta](const ThetaPoint& theta, std::size_t j) {
        const double bit = theta.at(coordinate) != 0.0 ? 1.0 : 0.0;
        return static_cast<double>(j) == bit ? 1.0 - delta : delta;
      },
      "bit" + std::to_string(coordinate) + "/delta=" + std::to_string(delta));
}

Experiment uninformative_experiment() {
  return Experiment::finite({0.0}, [](const ThetaPoint&, std::size_t) { return 1.0; },
                            "uninformative");
}

CostOracle cost_table(const std::vector<ThetaPoint>& atoms, std::vector<std::vector<double>> table) {
  if (atoms.size() != table.size()) fail(ErrorCode::kDomain, "cost table row count mismatch");
  auto index = std::make_shared<std::map<ThetaPoint, std::size_t>>();
  for (std::size_t i = 0; i < atoms.size(); ++i) (*index)[atoms[i]] = i;
  auto rows = std::make_shared<const std::vector<std::vector<double>>>(std::move(table));
  return [index, rows](const ThetaPoint& theta, std::size_t action) {
    auto it = index->find(theta);
    if (it == index->end()) fail(ErrorCode::kDomain, "cost table has no row for " + describe(theta));
    return (*rows)[it->second].at(action);
  };
}

namespace {

double checked_cost(const CostOracle& cost, const ThetaPoint& theta, std::size_t action) {
  const double c = cost(theta, action);
  if (!std::isfinite(c))
    fail(ErrorCode::kNumeric,
         "non-finite cost at theta=" + describe(theta) + ", action=" + std::to_string(action));
  return c;
}

}  // namespace

double expected_cost(const DiscreteBelief& belief, const CostOracle& cost, std::size_t action) {
  if (belief.size() == 0) fail(ErrorCode::kDomain, "empty belief");
  double s = 0.0;
  for (std::size_t i = 0; i < belief.size(); ++i)
    if (belief.weight(i) > 0.0) s += belief.weight(i) * checked_cost(cost, belief.atom(i), action);
  return s;
}

std::size_t ibr_action(const DiscreteBelief& belief, const ActionSet& actions,
                       const CostOracle& cost) {
  std::vector<double> values(actions.count);
  for (std::size_t a = 0; a < actions.count; ++a) values[a] = expected_cost(belief, cost, a);
  return argmin_over(values, detail::iota(actions.count)).action;
}

double mocu(const DiscreteBelief& belief, const ActionSet& actions, const CostOracle& cost) {
  if (actions.count == 0) fail(ErrorCode::kDomain, "empty action set");
  const std::size_t ibr = ibr_action(belief, actions, cost);
  double s = 0.0;
  for (std::size_t i = 0; i < belief.size(); ++i) {
    if (belief.weight(i) <= 0.0) continue;
    double best = checked_cost(cost, belief.atom(i), 0);
    for (std::size_t a = 1; a < actions.count; ++a)
      best = std::min(best, checked_cost(cost, belief.atom(i), a));
    s += belief.weight(i) * (checked_cost(cost, belief.atom(i), ibr) - best);
  }
  return s;
}

Estimate mocu_monte_carlo(const DiscreteBelief& belief, const ActionSet& actions,
                          const CostOracle& cost, std::size_t samples, Rng& rng) {
  if (samples < 2) fail(ErrorCode::kDomain, "need at least two samples");
  if (actions.count == 0) fail(ErrorCode::kDomain, "empty action set");
  std::discrete_distribution<std::size_t> pick(belief.weights().begin(), belief.weights().end());
  // Cost rows per drawn atom; the IBR action is chosen on the same draws.
  std::vector<std::size_t> drawn(samples);
  for (auto& d : drawn) d = pick(rng);
  std::map<std::size_t, std::vector<double>> rows;
  for (std::size_t d : drawn) {
    if (rows.count(d)) continue;
    std::vector<double> r(actions.count);
    for (std::size_t a = 0; a < actions.count; ++a) r[a] = checked_cost(cost, belief.atom(d), a);
    rows.emplace(d, std::move(r));
  }
  std::vector<double> mean_cost(actions.count, 0.0);
  for (std::size_t d : drawn)
    for (std::size_t a = 0; a < actions.count; ++a) mean_cost[a] += rows[d][a];
  const std::size_t ibr = argmin_over(mean_cost, detail::iota(actions.count)).action;
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t d : drawn) {
    const auto& r = rows[d];
    const double regret = r[ibr] - *std::min_element(r.begin(), r.end());
    sum += regret;
    sum_sq += regret * regret;
  }
  const double n = static_cast<double>(samples);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
  return {mean, std::sqrt(var / n)};
}

DiscreteBelief posterior(const DiscreteBelief& belief, const Experiment& experiment, double outcome,
                         const ParticleUpdateOptions& options) {
  std::vector<double> w(belief.size(), 0.0);
  if (experiment.is_finite()) {
    const std::size_t j = experiment.outcome_index(outcome);
    double total = 0.0;
    for (std::size_t i = 0; i < belief.size(); ++i) {
      if (belief.weight(i) <= 0.0) continue;
      w[i] = belief.weight(i) * experiment.probability(belief.atom(i), j);
      total += w[i];
    }
    if (!(total > 0.0))
      fail(ErrorCode::kImpossibleOutcome, "outcome has zero probability under every atom");
    return belief.reweighted(std::move(w));
  }
  if (!std::isfinite(outcome)) fail(ErrorCode::kDomain, "continuous outcome must be finite");
  std::vector<double> logw(belief.size(), -std::numeric_limits<double>::infinity());
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < belief.size(); ++i) {
    if (belief.weight(i) <= 0.0) continue;
    logw[i] = std::log(belief.weight(i)) + experiment.log_density(belief.atom(i), outcome);
    top = std::max(top, logw[i]);
  }
  if (!std::isfinite(top))
    fail(ErrorCode::kImpossibleOutcome, "outcome has zero likelihood under every atom");
  for (std::size_t i = 0; i < belief.size(); ++i) w[i] = std::exp(logw[i] - top);
  DiscreteBelief post = belief.reweighted(std::move(w));
  if (post.effective_sample_size() < options.min_effective_sample_size)
    fail(ErrorCode::kDegenerate, "effective sample size " +
                                     std::to_string(post.effective_sample_size()) +
                                     " below the degeneracy guard");
  return post;
}

DiscreteModel::DiscreteModel(DesignProblem problem, const DiscreteBelief& support,
                             ParticleUpdateOptions options)
    : problem_(std::move(problem)), atoms_(support.atoms()), options_(options) {
  if (problem_.actions.count == 0) fail(ErrorCode::kDomain, "empty action set");
  if (problem_.experiments.empty()) fail(ErrorCode::kDomain, "empty experiment set");
  costs_.resize(atoms_->size());
  for (std::size_t i = 0; i < atoms_->size(); ++i) {
    costs_[i].resize(problem_.actions.count);
    for (std::size_t a = 0; a < problem_.actions.count; ++a)
      costs_[i][a] = checked_cost(problem_.cost, (*atoms_)[i], a);
  }
  for (const Experiment& e : problem_.experiments) {
    if (!e.is_finite()) continue;
    for (const ThetaPoint& theta : *atoms_) {
      double s = 0.0;
      for (std::size_t j = 0; j < e.support.size(); ++j) {
        const double p = e.probability(theta, j);
        if (!(p >= 0.0)) fail(ErrorCode::kDomain, "negative outcome probability in '" + e.label + "'");
        s += p;
      }
      if (std::abs(s - 1.0) > 1e-12)
        fail(ErrorCode::kDomain, "outcome probabilities of '" + e.label + "' do not sum to 1 at " +
                                     describe(theta));
    }
  }
}

double DiscreteModel::cost(const Belief& b, std::size_t atom, std::size_t action) const {
  if (b.atoms() == atoms_) return costs_[atom][action];
  return checked_cost(problem_.cost, b.atom(atom), action);
}

std::vector<double> DiscreteModel::expected_costs(const Belief& b, const EvalContext&) const {
  std::vector<double> out(action_count(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double w = b.weight(i);
    if (w <= 0.0) continue;
    for (std::size_t a = 0; a < out.size(); ++a) out[a] += w * cost(b, i, a);
  }
  return out;
}

Estimate DiscreteModel::expected_optimal_cost(const Belief& b, const EvalContext&) const {
  double s = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double w = b.weight(i);
    if (w <= 0.0) continue;
    double best = cost(b, i, 0);
    for (std::size_t a = 1; a < action_count(); ++a) best = std::min(best, cost(b, i, a));
    s += w * best;
  }
  return {s, 0.0};
}

std::vector<double> DiscreteModel::predictive(const Belief& b, std::size_t experiment) const {
  const Experiment& e = problem_.experiments.at(experiment);
  if (!e.is_finite()) fail(ErrorCode::kDomain, "predictive table needs a finite experiment");
  std::vector<double> p(e.support.size(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b.weight(i) <= 0.0) continue;
    for (std::size_t j = 0; j < p.size(); ++j) p[j] += b.weight(i) * e.probability(b.atom(i), j);
  }
  return p;
}

OutcomeSet<double> DiscreteModel::outcomes(const Belief& b, std::size_t experiment,
                                           const EvalContext& ctx) const {
  const Experiment& e = problem_.experiments.at(experiment);
  OutcomeSet<double> out;
  if (e.is_finite()) {
    const std::vector<double> p = predictive(b, experiment);
    for (std::size_t j = 0; j < p.size(); ++j)
      if (p[j] > 0.0) out.items.push_back({e.support[j], p[j]});
    out.exact = true;
    return out;
  }
  Rng rng = ctx.outcome_rng(experiment);
  std::discrete_distribution<std::size_t> pick(b.weights().begin(), b.weights().end());
  const std::size_t n = ctx.config().mc_outcome_samples;
  const double w = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t atom = pick(rng);
    out.items.push_back({e.sample(b.atom(atom), rng), w});
  }
  out.exact = false;
  return out;
}

DiscreteBelief DiscreteModel::update(const Belief& b, std::size_t experiment, double outcome) const {
  return posterior(b, problem_.experiments.at(experiment), outcome, options_);
}

}  // namespace mocu::core
