#pragma once

// Generic experimental-design engine.
//
// A design model bundles a belief type, an action space, an experiment space
// and a cost. The engine only needs five things from it:
//
//   action_count(), experiment_count()
//   expected_costs(belief, ctx)        E_theta[C(theta, psi)] for every psi
//   expected_optimal_cost(belief, ctx) E_theta[min_psi C(theta, psi)]
//   outcomes(belief, experiment, ctx)  prior-predictive outcomes with weights
//   update(belief, experiment, outcome)
//
// and optionally
//
//   allowed_actions(belief), allowed_experiments(belief)   time-varying spaces
//   lookahead_reduction(belief, experiment, ctx)           closed form of
//       E_xi[ E_{theta|xi}[ C(theta, psi_IBR^{Theta|xi}) ] ] - E[C(theta, psi_IBR)]
//       (returned as a difference so small reductions keep their precision)
//
// Every design quantity is then derived here: the IBR action, MOCU, the
// remaining MOCU after an outcome, the experimental design value and the
// sequential selection loop.

#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "core/error.hpp"
#include "core/random.hpp"

namespace mocu::core {

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;  // zero for exact evaluations
};

struct EvalConfig {
  std::size_t mc_theta_samples = 256;
  std::size_t mc_outcome_samples = 64;
  std::uint64_t seed = 0;
};

/// Sample budgets plus the seeded substreams of one design step. Substreams are
/// keyed by (seed, step, path) so that two experiments never share samples and
/// identical inputs always reproduce identical draws.
class EvalContext {
 public:
  explicit EvalContext(EvalConfig config = {}, std::uint64_t step = 0)
      : config_(config), step_(step) {
    if (config_.mc_theta_samples == 0 || config_.mc_outcome_samples == 0)
      fail(ErrorCode::kDomain, "sample counts must be >= 1");
  }

  const EvalConfig& config() const noexcept { return config_; }
  std::uint64_t step() const noexcept { return step_; }

  Rng outcome_rng(std::size_t experiment) const {
    return make_rng(config_.seed, {stream::kOutcome, step_, experiment});
  }
  Rng theta_rng(std::uint64_t a = 0, std::uint64_t b = 0) const {
    return make_rng(config_.seed, {stream::kTheta, step_, a, b});
  }

 private:
  EvalConfig config_;
  std::uint64_t step_;
};

template <class Outcome>
struct WeightedOutcome {
  Outcome value;
  double weight;
};

template <class Outcome>
struct OutcomeSet {
  std::vector<WeightedOutcome<Outcome>> items;
  bool exact = true;  // false when the items are equally weighted MC draws
};

template <class M>
concept DesignModel = requires(const M& m, const typename M::Belief& b,
                               const typename M::Outcome& y, std::size_t k,
                               const EvalContext& ctx) {
  typename M::Belief;
  typename M::Outcome;
  { m.action_count() } -> std::convertible_to<std::size_t>;
  { m.experiment_count() } -> std::convertible_to<std::size_t>;
  { m.expected_costs(b, ctx) } -> std::convertible_to<std::vector<double>>;
  { m.expected_optimal_cost(b, ctx) } -> std::convertible_to<Estimate>;
  { m.outcomes(b, k, ctx) } -> std::convertible_to<OutcomeSet<typename M::Outcome>>;
  { m.update(b, k, y) } -> std::convertible_to<typename M::Belief>;
};

template <class M>
concept HasActionRestriction = requires(const M& m, const typename M::Belief& b) {
  { m.allowed_actions(b) } -> std::convertible_to<std::vector<std::size_t>>;
};

template <class M>
concept HasExperimentRestriction = requires(const M& m, const typename M::Belief& b) {
  { m.allowed_experiments(b) } -> std::convertible_to<std::vector<std::size_t>>;
};

template <class M>
concept HasClosedFormLookahead =
    requires(const M& m, const typename M::Belief& b, std::size_t k, const EvalContext& ctx) {
      { m.lookahead_reduction(b, k, ctx) } -> std::convertible_to<std::optional<double>>;
    };

namespace detail {

inline std::vector<std::size_t> iota(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

}  // namespace detail

template <DesignModel M>
std::vector<std::size_t> allowed_actions(const M& model, const typename M::Belief& belief) {
  if constexpr (HasActionRestriction<M>) {
    return model.allowed_actions(belief);
  } else {
    return detail::iota(model.action_count());
  }
}

template <DesignModel M>
std::vector<std::size_t> allowed_experiments(const M& model, const typename M::Belief& belief) {
  if constexpr (HasExperimentRestriction<M>) {
    return model.allowed_experiments(belief);
  } else {
    return detail::iota(model.experiment_count());
  }
}

struct IbrResult {
  std::size_t action = 0;
  double expected_cost = 0.0;
};

/// Picks the lowest-index minimizer over `candidates` of `values`.
inline IbrResult argmin_over(const std::vector<double>& values,
                             const std::vector<std::size_t>& candidates) {
  if (candidates.empty()) fail(ErrorCode::kDomain, "empty action set");
  IbrResult best{candidates.front(), std::numeric_limits<double>::infinity()};
  bool first = true;
  for (std::size_t a : candidates) {
    if (a >= values.size()) fail(ErrorCode::kDomain, "action index out of range");
    const double v = values[a];
    if (!std::isfinite(v))
      fail(ErrorCode::kNumeric, "non-finite expected cost for action " + std::to_string(a));
    if (first || v < best.expected_cost || (v == best.expected_cost && a < best.action)) {
      best = {a, v};
      first = false;
    }
  }
  return best;
}

template <DesignModel M>
IbrResult ibr_action(const M& model, const typename M::Belief& belief, const EvalContext& ctx) {
  return argmin_over(model.expected_costs(belief, ctx), allowed_actions(model, belief));
}

template <DesignModel M>
Estimate mocu(const M& model, const typename M::Belief& belief, const EvalContext& ctx) {
  const IbrResult ibr = ibr_action(model, belief, ctx);
  const Estimate opt = model.expected_optimal_cost(belief, ctx);
  return {ibr.expected_cost - opt.value, opt.std_error};
}

template <DesignModel M>
Estimate remaining_mocu(const M& model, const typename M::Belief& belief, std::size_t experiment,
                        const typename M::Outcome& outcome, const EvalContext& ctx) {
  return mocu(model, model.update(belief, experiment, outcome), ctx);
}

namespace detail {

template <DesignModel M>
Estimate enumerated_lookahead(const M& model, const typename M::Belief& belief,
                              std::size_t experiment, const EvalContext& ctx) {
  const OutcomeSet<typename M::Outcome> outcomes = model.outcomes(belief, experiment, ctx);
  if (outcomes.items.empty()) fail(ErrorCode::kDomain, "experiment has no outcomes");
  double sum = 0.0;
  double sum_sq = 0.0;
  double total_weight = 0.0;
  for (const auto& o : outcomes.items) {
    const auto posterior = model.update(belief, experiment, o.value);
    const double c = ibr_action(model, posterior, ctx).expected_cost;
    sum += o.weight * c;
    sum_sq += o.weight * c * c;
    total_weight += o.weight;
  }
  const double mean = sum / total_weight;
  double se = 0.0;
  const std::size_t n = outcomes.items.size();
  if (!outcomes.exact && n > 1) {
    const double var = std::max(0.0, sum_sq / total_weight - mean * mean) *
                       static_cast<double>(n) / static_cast<double>(n - 1);
    se = std::sqrt(var / static_cast<double>(n));
  }
  return {mean, se};
}

}  // namespace detail

/// Lookahead cost minus the current IBR cost (the design value up to the
/// common optimal-cost term). `current_ibr_cost` must be the IBR cost of
/// `belief`.
template <DesignModel M>
Estimate lookahead_reduction(const M& model, const typename M::Belief& belief,
                             std::size_t experiment, const EvalContext& ctx,
                             double current_ibr_cost) {
  if (experiment >= model.experiment_count())
    fail(ErrorCode::kDomain, "experiment index out of range");
  if constexpr (HasClosedFormLookahead<M>) {
    if (std::optional<double> v = model.lookahead_reduction(belief, experiment, ctx))
      return {*v, 0.0};
  }
  const Estimate look = detail::enumerated_lookahead(model, belief, experiment, ctx);
  return {look.value - current_ibr_cost, look.std_error};
}

/// E_xi[ E_{theta|xi}[ C(theta, psi_IBR^{Theta|xi}) ] ] for one experiment: the
/// expected cost of the IBR action that would be chosen after observing it.
template <DesignModel M>
Estimate lookahead_cost(const M& model, const typename M::Belief& belief, std::size_t experiment,
                        const EvalContext& ctx) {
  const double ibr = ibr_action(model, belief, ctx).expected_cost;
  const Estimate r = lookahead_reduction(model, belief, experiment, ctx, ibr);
  return {ibr + r.value, r.std_error};
}

/// Expected remaining MOCU. Uses E_xi[E_{theta|xi}[min C]] = E_theta[min C],
/// which holds exactly for enumerated outcomes and in expectation for sampled
/// ones, so the optimal-cost term is evaluated once under the prior.
template <DesignModel M>
Estimate design_value(const M& model, const typename M::Belief& belief, std::size_t experiment,
                      const EvalContext& ctx) {
  const Estimate look = lookahead_cost(model, belief, experiment, ctx);
  const Estimate opt = model.expected_optimal_cost(belief, ctx);
  return {look.value - opt.value, std::hypot(look.std_error, opt.std_error)};
}

struct Selection {
  std::size_t experiment = 0;
  Estimate design_value;
  double mocu_reduction = 0.0;  // design_value - mocu, always <= 0 up to tolerance
  double current_ibr_cost = 0.0;
  std::size_t current_ibr_action = 0;
  std::vector<double> lookahead;  // lookahead cost per experiment; NaN where not allowed
  std::vector<double> reduction;  // lookahead minus current IBR cost; NaN where not allowed
};

template <DesignModel M>
Selection select_experiment(const M& model, const typename M::Belief& belief,
                            const EvalContext& ctx, bool with_design_value = true) {
  const std::vector<std::size_t> exps = allowed_experiments(model, belief);
  if (exps.empty()) fail(ErrorCode::kExhausted, "no experiment available");
  const IbrResult ibr = ibr_action(model, belief, ctx);
  Selection sel;
  sel.current_ibr_action = ibr.action;
  sel.current_ibr_cost = ibr.expected_cost;
  sel.lookahead.assign(model.experiment_count(), std::numeric_limits<double>::quiet_NaN());
  sel.reduction = sel.lookahead;
  Estimate best{};
  bool first = true;
  for (std::size_t e : exps) {
    const Estimate r = lookahead_reduction(model, belief, e, ctx, ibr.expected_cost);
    if (!std::isfinite(r.value))
      fail(ErrorCode::kNumeric, "non-finite design value for experiment " + std::to_string(e));
    sel.lookahead[e] = ibr.expected_cost + r.value;
    sel.reduction[e] = r.value;
    if (first || r.value < best.value || (r.value == best.value && e < sel.experiment)) {
      best = r;
      sel.experiment = e;
      first = false;
    }
  }
  sel.mocu_reduction = best.value;
  if (with_design_value) {
    const Estimate opt = model.expected_optimal_cost(belief, ctx);
    sel.design_value = {ibr.expected_cost + best.value - opt.value,
                        std::hypot(best.std_error, opt.std_error)};
  } else {
    sel.design_value = {std::numeric_limits<double>::quiet_NaN(), 0.0};
  }
  return sel;
}

// ---------------------------------------------------------------------------
// Sequential loop

struct LoopConfig {
  std::size_t budget = 0;
  double stop_threshold = 1e-6;  // applied to |mocu_reduction|
  EvalConfig eval;
  bool track_mocu = true;
};

enum class StopReason { kBudget, kThreshold, kExhausted };

template <class Outcome>
struct StepRecord {
  std::size_t step = 0;  // 1-based
  std::size_t experiment = 0;
  Outcome outcome{};
  Estimate design_value;
  double mocu_reduction = 0.0;
  std::size_t best_action = 0;  // IBR action after the update
  Estimate mocu;                // MOCU after the update
};

template <class Outcome>
struct DesignTrace {
  std::size_t initial_best_action = 0;
  Estimate initial_mocu;
  std::vector<StepRecord<Outcome>> steps;
  StopReason stop = StopReason::kBudget;
};

template <class Outcome>
using Environment = std::function<Outcome(std::size_t step, std::size_t experiment)>;

template <DesignModel M>
struct LoopResult {
  DesignTrace<typename M::Outcome> trace;
  typename M::Belief belief;
};

template <DesignModel M>
LoopResult<M> run_design_loop(const M& model, typename M::Belief belief, const LoopConfig& config,
                              const Environment<typename M::Outcome>& environment) {
  DesignTrace<typename M::Outcome> trace;
  {
    const EvalContext ctx(config.eval, 0);
    trace.initial_best_action = ibr_action(model, belief, ctx).action;
    if (config.track_mocu) trace.initial_mocu = mocu(model, belief, ctx);
  }
  trace.stop = StopReason::kBudget;
  for (std::size_t step = 1; step <= config.budget; ++step) {
    const EvalContext ctx(config.eval, step);
    if (allowed_experiments(model, belief).empty()) {
      trace.stop = StopReason::kExhausted;
      break;
    }
    const Selection sel = select_experiment(model, belief, ctx, config.track_mocu);
    if (std::abs(sel.mocu_reduction) < config.stop_threshold) {
      trace.stop = StopReason::kThreshold;
      break;
    }
    typename M::Outcome outcome{};
    try {
      outcome = environment(step, sel.experiment);
    } catch (const std::exception& ex) {
      fail(ErrorCode::kEnvironment,
           "environment failed at step " + std::to_string(step) + ": " + ex.what());
    }
    belief = model.update(belief, sel.experiment, outcome);
    StepRecord<typename M::Outcome> rec;
    rec.step = step;
    rec.experiment = sel.experiment;
    rec.outcome = outcome;
    rec.design_value = sel.design_value;
    rec.mocu_reduction = sel.mocu_reduction;
    rec.best_action = ibr_action(model, belief, ctx).action;
    if (config.track_mocu) rec.mocu = mocu(model, belief, ctx);
    trace.steps.push_back(std::move(rec));
  }
  return {std::move(trace), std::move(belief)};
}

// ---------------------------------------------------------------------------
// Restriction adapter: time-varying action and experiment spaces supplied as
// callbacks of the current belief.

template <DesignModel M>
class Restricted {
 public:
  using Belief = typename M::Belief;
  using Outcome = typename M::Outcome;
  using Filter = std::function<std::vector<std::size_t>(const Belief&)>;

  Restricted(M base, Filter actions, Filter experiments)
      : base_(std::move(base)), actions_(std::move(actions)), experiments_(std::move(experiments)) {}

  std::size_t action_count() const { return base_.action_count(); }
  std::size_t experiment_count() const { return base_.experiment_count(); }
  std::vector<double> expected_costs(const Belief& b, const EvalContext& ctx) const {
    return base_.expected_costs(b, ctx);
  }
  Estimate expected_optimal_cost(const Belief& b, const EvalContext& ctx) const {
    return base_.expected_optimal_cost(b, ctx);
  }
  OutcomeSet<Outcome> outcomes(const Belief& b, std::size_t k, const EvalContext& ctx) const {
    return base_.outcomes(b, k, ctx);
  }
  Belief update(const Belief& b, std::size_t k, const Outcome& y) const {
    return base_.update(b, k, y);
  }
  std::vector<std::size_t> allowed_actions(const Belief& b) const {
    return actions_ ? actions_(b) : core::allowed_actions(base_, b);
  }
  std::vector<std::size_t> allowed_experiments(const Belief& b) const {
    return experiments_ ? experiments_(b) : core::allowed_experiments(base_, b);
  }
  const M& base() const noexcept { return base_; }

 private:
  M base_;
  Filter actions_;
  Filter experiments_;
};

}  // namespace mocu::core
