#include "scenarios/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "core/error.hpp"
#include "core/quadrature.hpp"

namespace mocu::surrogate {

namespace {

double log_normal_kernel(double y, double mean, double tau) {
  const double z = (y - mean) / tau;
  return -0.5 * z * z;
}

void check_belief(const SurrogateProblem& p, const SurrogateBelief& b) {
  if (b.dopants.size() != p.dopants) fail(ErrorCode::kDomain, "belief has the wrong number of dopants");
  for (const auto& d : b.dopants) {
    if (d.size() == 0) fail(ErrorCode::kDomain, "dopant belief has no particles");
    if (d.dimension() != 2) fail(ErrorCode::kDomain, "dopant particles must be (h, r)");
  }
}

// E[g] over one dopant's particles for each concentration.
std::vector<double> dopant_costs(const SurrogateProblem& p, const core::DiscreteBelief& d,
                                 const std::vector<double>& weights) {
  std::vector<double> out(p.concentrations.size(), 0.0);
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (weights[k] <= 0.0) continue;
    const auto& t = d.atom(k);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += weights[k] * p.g(t[0], t[1], p.concentrations[j]);
  }
  return out;
}

}  // namespace

double QuadraticSurrogate::operator()(double h, double r, double o) const {
  const double a = h - c1 * o;
  const double b = r - c3;
  return a * a + c2 * b * b + c4 * o;
}

void SurrogateProblem::validate() const {
  if (dopants == 0) fail(ErrorCode::kDomain, "need at least one dopant");
  if (concentrations.empty()) fail(ErrorCode::kDomain, "need at least one concentration");
  if (!(tau > 0.0) || !std::isfinite(tau)) fail(ErrorCode::kDomain, "tau must be positive and finite");
  if (!g) fail(ErrorCode::kDomain, "surrogate function not set");
  if (outcome_rule == OutcomeRule::kGaussHermite && quadrature_order == 0)
    fail(ErrorCode::kDomain, "quadrature order must be >= 1");
}

std::vector<core::ThetaPoint> grid_particles(double h_lo, double h_hi, double r_lo, double r_hi,
                                             std::size_t per_axis) {
  if (per_axis == 0) fail(ErrorCode::kDomain, "grid needs at least one point per axis");
  auto at = [&](double lo, double hi, std::size_t i) {
    return per_axis == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(per_axis - 1);
  };
  std::vector<core::ThetaPoint> out;
  for (std::size_t i = 0; i < per_axis; ++i)
    for (std::size_t j = 0; j < per_axis; ++j) out.push_back({at(h_lo, h_hi, i), at(r_lo, r_hi, j)});
  return out;
}

std::vector<core::ThetaPoint> sample_particles(std::size_t count, double h_lo, double h_hi, double r_lo,
                                               double r_hi, Rng& rng) {
  std::uniform_real_distribution<double> h(h_lo, h_hi), r(r_lo, r_hi);
  std::vector<core::ThetaPoint> out(count);
  for (auto& t : out) {
    const double hv = h(rng);
    t = {hv, r(rng)};
  }
  return out;
}

std::vector<double> expected_costs(const SurrogateProblem& p, const SurrogateBelief& b) {
  check_belief(p, b);
  std::vector<double> out;
  out.reserve(p.pair_count());
  for (const auto& d : b.dopants) {
    const auto c = dopant_costs(p, d, d.weights());
    out.insert(out.end(), c.begin(), c.end());
  }
  return out;
}

Candidate surrogate_ibr(const SurrogateProblem& p, const SurrogateBelief& b) {
  const auto c = expected_costs(p, b);
  const std::size_t best = static_cast<std::size_t>(std::min_element(c.begin(), c.end()) - c.begin());
  return {best / p.concentrations.size(), best % p.concentrations.size(), c[best]};
}

SurrogateBelief surrogate_update(const SurrogateProblem& p, const SurrogateBelief& b, std::size_t dopant,
                                 std::size_t conc, double outcome) {
  check_belief(p, b);
  if (dopant >= p.dopants || conc >= p.concentrations.size()) fail(ErrorCode::kDomain, "pair out of range");
  const double o = p.concentrations[conc];
  const double tau = p.tau;
  const SurrogateFn& g = p.g;
  const core::Experiment e = core::Experiment::continuous(
      nullptr, [&](const core::ThetaPoint& t, double y) { return log_normal_kernel(y, g(t[0], t[1], o), tau); });
  SurrogateBelief out = b;
  out.dopants[dopant] = core::posterior(b.dopants[dopant], e, outcome, {p.min_effective_sample_size});
  return out;
}

core::OutcomeSet<double> predictive_outcomes(const SurrogateProblem& p, const SurrogateBelief& b,
                                             std::size_t dopant, std::size_t conc,
                                             const core::EvalContext& ctx) {
  check_belief(p, b);
  const core::DiscreteBelief& d = b.dopants.at(dopant);
  const double o = p.concentrations.at(conc);
  core::OutcomeSet<double> out;
  if (p.outcome_rule == OutcomeRule::kGaussHermite) {
    const core::QuadratureRule rule = core::gauss_hermite_normal(p.quadrature_order);
    for (std::size_t k = 0; k < d.size(); ++k) {
      if (d.weight(k) <= 0.0) continue;
      const double mean = p.g(d.atom(k)[0], d.atom(k)[1], o);
      for (std::size_t m = 0; m < rule.nodes.size(); ++m)
        out.items.push_back({mean + p.tau * rule.nodes[m], d.weight(k) * rule.weights[m]});
    }
    out.exact = true;
    return out;
  }
  Rng rng = ctx.outcome_rng(p.pair_index(dopant, conc));
  std::discrete_distribution<std::size_t> pick(d.weights().begin(), d.weights().end());
  std::normal_distribution<double> noise(0.0, p.tau);
  const std::size_t n = ctx.config().mc_outcome_samples;
  for (std::size_t s = 0; s < n; ++s) {
    const auto& t = d.atom(pick(rng));
    out.items.push_back({p.g(t[0], t[1], o) + noise(rng), 1.0 / static_cast<double>(n)});
  }
  out.exact = false;
  return out;
}

SurrogateDesign surrogate_design_policy(const SurrogateProblem& p, const SurrogateBelief& b,
                                        const core::EvalContext& ctx) {
  p.validate();
  check_belief(p, b);
  const std::size_t np = p.concentrations.size();
  std::vector<std::vector<double>> base(p.dopants);
  for (std::size_t i = 0; i < p.dopants; ++i) base[i] = dopant_costs(p, b.dopants[i], b.dopants[i].weights());

  SurrogateDesign out;
  out.current_ibr_cost = surrogate_ibr(p, b).expected_cost;
  out.values.assign(p.pair_count(), 0.0);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.dopants; ++i) {
    // Cheapest pair among the dopants that the measurement leaves untouched.
    double others = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < p.dopants; ++k)
      if (k != i) others = std::min(others, *std::min_element(base[k].begin(), base[k].end()));
    const core::DiscreteBelief& d = b.dopants[i];
    for (std::size_t j = 0; j < np; ++j) {
      const double o = p.concentrations[j];
      std::vector<double> means(d.size());
      for (std::size_t k = 0; k < d.size(); ++k) means[k] = p.g(d.atom(k)[0], d.atom(k)[1], o);
      const auto outcomes = predictive_outcomes(p, b, i, j, ctx);
      double sum = 0.0, total = 0.0;
      std::vector<double> w(d.size());
      for (const auto& y : outcomes.items) {
        double top = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < d.size(); ++k) {
          w[k] = d.weight(k) > 0.0 ? std::log(d.weight(k)) + log_normal_kernel(y.value, means[k], p.tau)
                                   : -std::numeric_limits<double>::infinity();
          top = std::max(top, w[k]);
        }
        double z = 0.0, z2 = 0.0;
        for (double& v : w) {
          v = std::exp(v - top);
          z += v;
        }
        for (double& v : w) {
          v /= z;
          z2 += v * v;
        }
        if (1.0 / z2 < p.min_effective_sample_size)
          fail(ErrorCode::kDegenerate, "effective sample size " + std::to_string(1.0 / z2) +
                                           " below the degeneracy guard");
        const auto c = dopant_costs(p, d, w);
        sum += y.weight * std::min(others, *std::min_element(c.begin(), c.end()));
        total += y.weight;
      }
      const std::size_t e = p.pair_index(i, j);
      out.values[e] = sum / total;
      // Values within round-off of the incumbent keep the lower index.
      if (e == 0 || out.values[e] < best - 1e-12 * (1.0 + std::abs(best))) {
        best = out.values[e];
        out.experiment = {i, j, out.values[e]};
      }
    }
  }
  return out;
}

SurrogateModel::SurrogateModel(SurrogateProblem problem) : problem_(std::move(problem)) { problem_.validate(); }

std::vector<double> SurrogateModel::expected_costs(const Belief& b, const core::EvalContext&) const {
  return surrogate::expected_costs(problem_, b);
}

core::Estimate SurrogateModel::expected_optimal_cost(const Belief& b, const core::EvalContext&) const {
  check_belief(problem_, b);
  // E[min] = L + integral over t > L of prod_i P(m_i > t), swept over the
  // sorted per-particle minima.
  struct Event {
    double value;
    std::size_t dopant;
    double weight;
  };
  std::vector<Event> ev;
  for (std::size_t i = 0; i < b.dopants.size(); ++i) {
    const auto& d = b.dopants[i];
    for (std::size_t k = 0; k < d.size(); ++k) {
      if (d.weight(k) <= 0.0) continue;
      double m = std::numeric_limits<double>::infinity();
      for (double o : problem_.concentrations) m = std::min(m, problem_.g(d.atom(k)[0], d.atom(k)[1], o));
      ev.push_back({m, i, d.weight(k)});
    }
  }
  std::sort(ev.begin(), ev.end(), [](const Event& a, const Event& c) { return a.value < c.value; });
  std::vector<double> survival(b.dopants.size(), 1.0);
  double result = ev.front().value;
  for (std::size_t e = 0; e + 1 < ev.size(); ++e) {
    survival[ev[e].dopant] = std::max(0.0, survival[ev[e].dopant] - ev[e].weight);
    double s = 1.0;
    for (double v : survival) s *= v;
    if (s <= 0.0) break;
    result += s * (ev[e + 1].value - ev[e].value);
  }
  return {result, 0.0};
}

core::OutcomeSet<double> SurrogateModel::outcomes(const Belief& b, std::size_t experiment,
                                                  const core::EvalContext& ctx) const {
  const std::size_t np = problem_.concentrations.size();
  return predictive_outcomes(problem_, b, experiment / np, experiment % np, ctx);
}

SurrogateBelief SurrogateModel::update(const Belief& b, std::size_t experiment, double outcome) const {
  const std::size_t np = problem_.concentrations.size();
  return surrogate_update(problem_, b, experiment / np, experiment % np, outcome);
}

std::vector<core::ThetaPoint> sample_truth(const SurrogateBelief& b, Rng& rng) {
  std::vector<core::ThetaPoint> out;
  for (const auto& d : b.dopants) {
    std::discrete_distribution<std::size_t> pick(d.weights().begin(), d.weights().end());
    out.push_back(d.atom(pick(rng)));
  }
  return out;
}

double measure(const SurrogateProblem& p, const std::vector<core::ThetaPoint>& truth, std::size_t dopant,
               std::size_t conc, Rng& rng) {
  const auto& t = truth.at(dopant);
  std::normal_distribution<double> noise(0.0, p.tau);
  return p.g(t[0], t[1], p.concentrations.at(conc)) + noise(rng);
}

}  // namespace mocu::surrogate
