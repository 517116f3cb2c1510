#pragma once

// Head-to-head simulation study on random quadratic reward functions: the
// MOCU policy under a normal-inverse-gamma belief against knowledge gradient
// on a GPR belief, scored by opportunity cost.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "core/random.hpp"

namespace mocu::bench {

enum class Policy { kMocu, kKg };
std::string policy_name(Policy p);
Policy parse_policy(const std::string& name);

enum class NoiseMode {
  kCommon,       // noise keyed by (run, iteration, action), shared by policies
  kIndependent,  // noise also keyed by policy
};

std::vector<double> default_grid();

struct SimConfig {
  std::vector<double> grid = default_grid();
  std::size_t runs = 200;
  std::size_t iterations = 5;
  std::size_t initial_actions = 4;
  // theta sampling: t1 ~ U, t2 = -2 t1 r with r ~ U, t3 ~ U, t4 = sd(f) w with w ~ U
  double theta1_lo = -5.0, theta1_hi = 2.0;
  double r_lo = -2.5, r_hi = 13.0;
  double theta3_lo = -5.0, theta3_hi = 5.0;
  double w_lo = 0.075, w_hi = 0.7;
  std::size_t mc_theta_samples = 256;
  std::size_t mc_outcome_samples = 64;
  bool exact_lookahead = true;
  bool common_outcome_draws = true;  // MOCU candidates share outcome draws
  std::size_t gpr_restarts = 5;
  NoiseMode noise = NoiseMode::kCommon;
  std::uint64_t seed = 1;
  std::vector<Policy> policies{Policy::kMocu, Policy::kKg};
  std::size_t parallelism = 1;  // execution only; not part of the fingerprint

  void validate() const;
  /// Hash of every setting that affects results.
  std::uint64_t fingerprint() const;
};

struct TrueModel {
  double theta1 = 0, theta2 = 0, theta3 = 0, theta4 = 0;
  std::vector<double> rewards;  // f on the grid
  std::size_t best_action = 0;

  double reward(double psi) const { return theta1 * psi * psi + theta2 * psi + theta3; }
  double best_reward() const { return rewards[best_action]; }
};

TrueModel make_true_model(double t1, double t2, double t3, double t4, const std::vector<double>& grid);
/// Population standard deviation.
double population_sd(const std::vector<double>& v);
TrueModel sample_true_model(const SimConfig& config, Rng& rng);

/// The run's true model and initial actions, both shared by every policy.
TrueModel run_true_model(const SimConfig& config, std::size_t run);
std::vector<std::size_t> run_initial_actions(const SimConfig& config, std::size_t run);
/// Noisy observation of action `action` at iteration `iteration` (0 = initial data).
double observe(const SimConfig& config, const TrueModel& truth, std::size_t run, std::size_t iteration,
               std::size_t action, Policy policy);

struct IterationRecord {
  std::size_t iteration = 0;
  long experiment = -1;  // -1 at iteration 0
  double outcome = 0.0;  // NaN at iteration 0
  std::size_t best_action = 0;
  double opportunity_cost = 0.0;
};

struct EpisodeRecord {
  std::size_t run = 0;
  Policy policy = Policy::kMocu;
  std::vector<IterationRecord> iterations;
  double wall_seconds = 0.0;
  bool failed = false;
  std::string diagnostics;
  std::uint64_t config_fingerprint = 0;
};

EpisodeRecord run_episode(Policy policy, const TrueModel& truth, const SimConfig& config, std::size_t run);

/// Every (run, policy) episode, ordered by run then by config.policies.
/// Runs are spread over config.parallelism threads; the order of the result
/// does not depend on scheduling.
std::vector<EpisodeRecord> run_benchmark(const SimConfig& config,
                                         const std::function<void(std::size_t done)>& progress = {});

struct AggregateRow {
  Policy policy = Policy::kMocu;
  std::size_t iteration = 0;
  double mean_oc = 0.0;
  double stderr_oc = 0.0;
  std::size_t n_runs = 0;
};

struct Aggregate {
  std::vector<AggregateRow> rows;  // by policy (first appearance), then iteration
  std::size_t failed = 0;
};

/// Failed episodes are excluded and counted. Records from different configs
/// raise a config-mismatch error.
Aggregate aggregate(const std::vector<EpisodeRecord>& records);

struct PairedDifference {
  std::size_t iteration = 0;
  double mean = 0.0;  // mean over runs of oc(b) - oc(a)
  double stderr_diff = 0.0;
  std::size_t n_pairs = 0;
};

/// Per iteration, over runs where both policies succeeded.
std::vector<PairedDifference> paired_differences(const std::vector<EpisodeRecord>& records, Policy a, Policy b);

void write_raw_csv(std::ostream& os, const std::vector<EpisodeRecord>& records);
void write_aggregate_csv(std::ostream& os, const Aggregate& agg);
/// Mean opportunity cost against iteration, one line per policy, with
/// +-1 standard error bars.
void write_svg_plot(std::ostream& os, const Aggregate& agg);

}  // namespace mocu::bench
