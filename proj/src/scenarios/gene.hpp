#pragma once

// Deterministic multi-trajectory network with uncertain interaction
// priorities. Node values are nonnegative integers; an interaction fires when
// all inputs and activators are nonzero and all inhibitors are zero, taking one
// unit from each input and adding one to each output. theta has one bit per
// competing pair: bit k = 1 means the pair's first interaction wins.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "core/discrete.hpp"

namespace mocu::gene {

using State = std::vector<std::int64_t>;
using Bits = std::vector<int>;

struct Interaction {
  std::string name;
  std::vector<std::size_t> inputs, activators, inhibitors, outputs;
};

struct CompetingPair {
  std::size_t first = 0, second = 0;  // interaction indices
};

enum class CycleRule { kAverage, kFirstState };
enum class Norm { kL1, kL2, kLinf };

struct Network {
  std::vector<std::string> nodes;
  std::vector<Interaction> interactions;
  std::vector<CompetingPair> pairs;
  std::vector<State> initial_states;
  std::vector<double> initial_probabilities;  // empty = uniform
  std::vector<double> target;                 // desired steady state v
  std::vector<std::size_t> actions;           // blockable interactions; empty = all
  std::size_t max_steps = 1000;
  CycleRule cycle = CycleRule::kAverage;
  Norm norm = Norm::kL1;

  std::size_t node_count() const noexcept { return nodes.size(); }
  std::size_t priority_count() const noexcept { return pairs.size(); }
  std::size_t action_count() const noexcept { return actions.empty() ? interactions.size() : actions.size(); }
  std::size_t blocked_interaction(std::size_t action) const;
  double initial_probability(std::size_t k) const;
  void validate() const;
};

struct Trajectory {
  std::vector<State> states;          // x0 .. last state before a repeat
  std::vector<double> steady_state;   // x_f
  bool cyclic = false;                // false = fixed point
  std::size_t cycle_start = 0;        // index into states when cyclic
};

std::vector<std::size_t> enabled_interactions(const Network& net, const State& x, std::size_t blocked);
/// The interaction that fires among `enabled` under the priority bits.
std::size_t resolve_priority(const Network& net, const std::vector<std::size_t>& enabled, const Bits& theta);

Trajectory simulate_trajectory(const Network& net, const State& x0, const Bits& theta, std::size_t action);

double distance(const std::vector<double>& a, const std::vector<double>& b, Norm norm);

/// E_{x0}[ ||x_f - v|| ] under theta and action.
double trajectory_cost(const Network& net, const Bits& theta, std::size_t action);

/// Theta encodings: atom k of the enumeration is the bit vector of k, with
/// bit 0 the least significant.
constexpr std::size_t kMaxPriorityBits = 20;
std::vector<Bits> enumerate_theta(std::size_t r);
Bits to_bits(const core::ThetaPoint& theta);
core::ThetaPoint to_point(const Bits& bits);

/// Independent Bernoulli prior with P(theta_k = 1) = p_one[k].
core::DiscreteBelief independent_prior(const std::vector<double>& p_one);

/// Costs tabulated over every theta and action: [atom][action].
std::vector<std::vector<double>> cost_table(const Network& net);

/// The generic design problem: actions block interactions, experiment k
/// reports theta_k flipped with probability deltas[k].
core::DesignProblem design_problem(const Network& net, const std::vector<double>& deltas);

struct GeneDesign {
  std::size_t experiment = 0;
  std::vector<double> values;  // E_{theta_i} E_{xi_i|theta_i} E_{theta\theta_i}[C(theta, psi_IBR|xi_i)]
};

/// Direct triple-expectation enumeration for the noisy priority experiments.
GeneDesign gene_design_policy(const Network& net, const core::DiscreteBelief& prior,
                              const std::vector<double>& deltas);

// Fixture files ------------------------------------------------------------

struct ExpectedTrajectory {
  Bits theta;
  std::size_t action = 0;
  std::size_t initial = 0;
  std::vector<State> states;
};

struct Fixture {
  Network network;
  std::vector<double> deltas;
  std::vector<double> prior_one;  // empty = 0.5 for every bit
  std::vector<ExpectedTrajectory> expected_trajectories;
};

/// Line-oriented format, one directive per line, '#' starts a comment:
///
///   nodes A B C
///   interaction r0 in=A act= inh=C out=B
///   pair r0 r1
///   initial 1 0 0 [p=0.5]
///   target 0 1 0
///   actions r0 r2
///   delta 0.1 0.2
///   prior 0.5 0.5
///   max_steps 100
///   cycle average|first
///   norm l1|l2|linf
///   trajectory theta=01 action=r0 initial=0 : 1,0,0 0,1,0
///
/// Lists inside in=/act=/inh=/out= are comma separated node names. Errors
/// carry the line number.
Fixture parse_fixture(std::istream& in, const std::string& source = "<fixture>");
Fixture load_fixture(const std::string& path);

}  // namespace mocu::gene
