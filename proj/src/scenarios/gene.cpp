#include "scenarios/gene.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "core/error.hpp"

namespace mocu::gene {

namespace {

std::string describe(const State& x) {
  std::ostringstream os;
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
  return os.str();
}

std::string describe(const Bits& b) {
  std::string s;
  for (int v : b) s += v ? '1' : '0';
  return s;
}

bool nonzero_all(const State& x, const std::vector<std::size_t>& idx) {
  return std::all_of(idx.begin(), idx.end(), [&](std::size_t i) { return x[i] != 0; });
}

}  // namespace

std::size_t Network::blocked_interaction(std::size_t action) const {
  if (action >= action_count()) fail(ErrorCode::kDomain, "action index out of range");
  return actions.empty() ? action : actions[action];
}

double Network::initial_probability(std::size_t k) const {
  if (initial_probabilities.empty()) return 1.0 / static_cast<double>(initial_states.size());
  return initial_probabilities[k];
}

void Network::validate() const {
  const std::size_t n = nodes.size();
  if (n == 0) fail(ErrorCode::kDomain, "network has no nodes");
  if (interactions.empty()) fail(ErrorCode::kDomain, "network has no interactions");
  for (const Interaction& it : interactions)
    for (const auto* list : {&it.inputs, &it.activators, &it.inhibitors, &it.outputs})
      for (std::size_t v : *list)
        if (v >= n) fail(ErrorCode::kDomain, "interaction '" + it.name + "' names an unknown node");
  if (pairs.empty()) fail(ErrorCode::kDomain, "network needs at least one competing pair");
  if (pairs.size() > kMaxPriorityBits)
    fail(ErrorCode::kEnumerationLimit, "too many competing pairs for exact enumeration (" +
                                           std::to_string(pairs.size()) + " > 20)");
  for (const CompetingPair& p : pairs)
    if (p.first >= interactions.size() || p.second >= interactions.size() || p.first == p.second)
      fail(ErrorCode::kDomain, "invalid competing pair");
  for (std::size_t a : actions)
    if (a >= interactions.size()) fail(ErrorCode::kDomain, "blockable interaction out of range");
  if (initial_states.empty()) fail(ErrorCode::kDomain, "network has no initial states");
  for (const State& x : initial_states) {
    if (x.size() != n) fail(ErrorCode::kDomain, "initial state has the wrong length");
    for (auto v : x)
      if (v < 0) fail(ErrorCode::kDomain, "node values must be nonnegative");
  }
  if (!initial_probabilities.empty()) {
    if (initial_probabilities.size() != initial_states.size())
      fail(ErrorCode::kDomain, "initial probabilities do not match the initial states");
    double s = 0.0;
    for (double p : initial_probabilities) {
      if (!(p >= 0.0)) fail(ErrorCode::kDomain, "negative initial-state probability");
      s += p;
    }
    if (std::abs(s - 1.0) > 1e-9) fail(ErrorCode::kDomain, "initial-state probabilities must sum to 1");
  }
  if (target.size() != n) fail(ErrorCode::kDomain, "target vector has the wrong length");
  if (max_steps == 0) fail(ErrorCode::kDomain, "max_steps must be >= 1");
}

std::vector<std::size_t> enabled_interactions(const Network& net, const State& x, std::size_t blocked) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < net.interactions.size(); ++k) {
    if (k == blocked) continue;
    const Interaction& it = net.interactions[k];
    if (!nonzero_all(x, it.inputs) || !nonzero_all(x, it.activators)) continue;
    if (std::any_of(it.inhibitors.begin(), it.inhibitors.end(), [&](std::size_t i) { return x[i] != 0; }))
      continue;
    out.push_back(k);
  }
  return out;
}

std::size_t resolve_priority(const Network& net, const std::vector<std::size_t>& enabled, const Bits& theta) {
  if (enabled.empty()) fail(ErrorCode::kDomain, "no enabled interaction");
  auto is_enabled = [&](std::size_t k) { return std::find(enabled.begin(), enabled.end(), k) != enabled.end(); };
  for (std::size_t k : enabled) {
    bool dominated = false;
    for (std::size_t p = 0; p < net.pairs.size() && !dominated; ++p) {
      const auto& pr = net.pairs[p];
      const std::size_t winner = theta[p] ? pr.first : pr.second;
      const std::size_t loser = theta[p] ? pr.second : pr.first;
      dominated = loser == k && is_enabled(winner);
    }
    if (!dominated) return k;  // enabled is sorted, so this is the lowest index
  }
  return enabled.front();
}

Trajectory simulate_trajectory(const Network& net, const State& x0, const Bits& theta, std::size_t action) {
  if (theta.size() != net.pairs.size()) fail(ErrorCode::kDomain, "theta has the wrong number of bits");
  if (x0.size() != net.node_count()) fail(ErrorCode::kDomain, "initial state has the wrong length");
  const std::size_t blocked = net.blocked_interaction(action);
  Trajectory t;
  std::map<State, std::size_t> seen;
  State x = x0;
  for (std::size_t step = 0;; ++step) {
    seen.emplace(x, t.states.size());
    t.states.push_back(x);
    const auto enabled = enabled_interactions(net, x, blocked);
    if (enabled.empty()) {
      t.steady_state.assign(x.begin(), x.end());
      return t;
    }
    if (step >= net.max_steps)
      fail(ErrorCode::kDivergence, "trajectory did not settle within " + std::to_string(net.max_steps) +
                                       " steps (x0=" + describe(x0) + ", theta=" + describe(theta) +
                                       ", action=" + std::to_string(action) + ")");
    const Interaction& it = net.interactions[resolve_priority(net, enabled, theta)];
    for (std::size_t i : it.inputs) --x[i];
    for (std::size_t i : it.outputs) ++x[i];
    if (auto hit = seen.find(x); hit != seen.end()) {
      t.cyclic = true;
      t.cycle_start = hit->second;
      const std::size_t len = t.states.size() - t.cycle_start;
      t.steady_state.assign(x.size(), 0.0);
      if (net.cycle == CycleRule::kFirstState) {
        for (std::size_t i = 0; i < x.size(); ++i)
          t.steady_state[i] = static_cast<double>(t.states[t.cycle_start][i]);
      } else {
        for (std::size_t s = t.cycle_start; s < t.states.size(); ++s)
          for (std::size_t i = 0; i < x.size(); ++i)
            t.steady_state[i] += static_cast<double>(t.states[s][i]) / static_cast<double>(len);
      }
      return t;
    }
  }
}

double distance(const std::vector<double>& a, const std::vector<double>& b, Norm norm) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::abs(a[i] - b[i]);
    switch (norm) {
      case Norm::kL1: s += d; break;
      case Norm::kL2: s += d * d; break;
      case Norm::kLinf: s = std::max(s, d); break;
    }
  }
  return norm == Norm::kL2 ? std::sqrt(s) : s;
}

double trajectory_cost(const Network& net, const Bits& theta, std::size_t action) {
  double c = 0.0;
  for (std::size_t k = 0; k < net.initial_states.size(); ++k) {
    const double p = net.initial_probability(k);
    if (p == 0.0) continue;
    c += p * distance(simulate_trajectory(net, net.initial_states[k], theta, action).steady_state,
                      net.target, net.norm);
  }
  return c;
}

std::vector<Bits> enumerate_theta(std::size_t r) {
  if (r > kMaxPriorityBits) fail(ErrorCode::kEnumerationLimit, "at most 20 priority bits can be enumerated");
  std::vector<Bits> out(std::size_t{1} << r, Bits(r));
  for (std::size_t k = 0; k < out.size(); ++k)
    for (std::size_t b = 0; b < r; ++b) out[k][b] = static_cast<int>((k >> b) & 1U);
  return out;
}

Bits to_bits(const core::ThetaPoint& theta) {
  Bits b(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) b[i] = theta[i] != 0.0 ? 1 : 0;
  return b;
}

core::ThetaPoint to_point(const Bits& bits) { return core::ThetaPoint(bits.begin(), bits.end()); }

core::DiscreteBelief independent_prior(const std::vector<double>& p_one) {
  std::vector<core::ThetaPoint> atoms;
  std::vector<double> w;
  for (const Bits& b : enumerate_theta(p_one.size())) {
    double p = 1.0;
    for (std::size_t k = 0; k < b.size(); ++k) {
      if (!(p_one[k] >= 0.0 && p_one[k] <= 1.0)) fail(ErrorCode::kDomain, "prior probability outside [0, 1]");
      p *= b[k] ? p_one[k] : 1.0 - p_one[k];
    }
    atoms.push_back(to_point(b));
    w.push_back(p);
  }
  return {std::move(atoms), std::move(w)};
}

std::vector<std::vector<double>> cost_table(const Network& net) {
  net.validate();
  std::vector<std::vector<double>> table;
  for (const Bits& b : enumerate_theta(net.priority_count())) {
    std::vector<double> row(net.action_count());
    for (std::size_t a = 0; a < row.size(); ++a) row[a] = trajectory_cost(net, b, a);
    table.push_back(std::move(row));
  }
  return table;
}

core::DesignProblem design_problem(const Network& net, const std::vector<double>& deltas) {
  net.validate();
  if (deltas.size() != net.priority_count())
    fail(ErrorCode::kDomain, "need one delta per priority bit");
  core::DesignProblem p;
  p.actions = core::ActionSet::of_size(net.action_count());
  for (std::size_t a = 0; a < net.action_count(); ++a)
    p.actions.labels.push_back("block " + net.interactions[net.blocked_interaction(a)].name);
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    if (!(deltas[k] >= 0.0 && deltas[k] <= 0.5)) fail(ErrorCode::kDomain, "delta must lie in [0, 0.5]");
    core::Experiment e = core::noisy_binary_experiment(k, deltas[k]);
    e.label = "measure theta_" + std::to_string(k);
    p.experiments.push_back(std::move(e));
  }
  std::vector<core::ThetaPoint> atoms;
  for (const Bits& b : enumerate_theta(net.priority_count())) atoms.push_back(to_point(b));
  p.cost = core::cost_table(atoms, cost_table(net));
  return p;
}

GeneDesign gene_design_policy(const Network& net, const core::DiscreteBelief& prior,
                              const std::vector<double>& deltas) {
  net.validate();
  const std::size_t r = net.priority_count();
  if (deltas.size() != r) fail(ErrorCode::kDomain, "need one delta per priority bit");
  if (prior.dimension() != r) fail(ErrorCode::kDomain, "prior atoms do not match the priority bits");
  const std::size_t na = net.action_count();
  std::vector<std::vector<double>> cost(prior.size(), std::vector<double>(na));
  std::vector<Bits> bits(prior.size());
  for (std::size_t k = 0; k < prior.size(); ++k) {
    bits[k] = to_bits(prior.atom(k));
    for (std::size_t a = 0; a < na; ++a) cost[k][a] = trajectory_cost(net, bits[k], a);
  }

  GeneDesign out;
  out.values.resize(r);
  for (std::size_t i = 0; i < r; ++i) {
    const double d = deltas[i];
    if (!(d >= 0.0 && d <= 0.5)) fail(ErrorCode::kDomain, "delta must lie in [0, 0.5]");
    auto lik = [&](int xi, int ti) { return xi == ti ? 1.0 - d : d; };
    // IBR action after each outcome xi of experiment i.
    std::size_t ibr[2] = {0, 0};
    bool possible[2] = {false, false};
    for (int xi = 0; xi < 2; ++xi) {
      std::vector<double> ec(na, 0.0);
      double z = 0.0;
      for (std::size_t k = 0; k < prior.size(); ++k) {
        const double w = prior.weight(k) * lik(xi, bits[k][i]);
        z += w;
        for (std::size_t a = 0; a < na; ++a) ec[a] += w * cost[k][a];
      }
      possible[xi] = z > 0.0;
      ibr[xi] = static_cast<std::size_t>(std::min_element(ec.begin(), ec.end()) - ec.begin());
    }
    double value = 0.0;
    for (int ti = 0; ti < 2; ++ti) {
      double p_ti = 0.0;
      for (std::size_t k = 0; k < prior.size(); ++k)
        if (bits[k][i] == ti) p_ti += prior.weight(k);
      if (p_ti == 0.0) continue;
      for (int xi = 0; xi < 2; ++xi) {
        if (!possible[xi] || lik(xi, ti) == 0.0) continue;
        double inner = 0.0;  // E_{theta \ theta_i | theta_i}[C(theta, psi_IBR|xi)]
        for (std::size_t k = 0; k < prior.size(); ++k)
          if (bits[k][i] == ti) inner += prior.weight(k) / p_ti * cost[k][ibr[xi]];
        value += p_ti * lik(xi, ti) * inner;
      }
    }
    out.values[i] = value;
    if (value < out.values[out.experiment]) out.experiment = i;
  }
  return out;
}

}  // namespace mocu::gene
