#include <cmath>
#include <random>

#include "core/discrete.hpp"
#include "core/engine.hpp"
#include "doctest.h"
#include "helpers.hpp"

using mocu::Error;
using mocu::ErrorCode;
using mocu::make_rng;
using mocu::Rng;
using namespace mocu::core;
namespace core = mocu::core;

namespace {

// Binary theta in one coordinate, symmetric cost matrix [[0,1],[1,0]].
DesignProblem symmetric_binary(ExperimentSet experiments) {
  DesignProblem p;
  p.actions = ActionSet::of_size(2);
  p.experiments = std::move(experiments);
  p.cost = [](const ThetaPoint& t, std::size_t a) { return t[0] == static_cast<double>(a) ? 0.0 : 1.0; };
  return p;
}

DiscreteBelief binary_prior(double p0 = 0.5) { return DiscreteBelief({{0.0}, {1.0}}, {p0, 1.0 - p0}); }

// Three atoms, weights [0.5, 0.3, 0.2], costs [[1,2],[4,0],[10,5]].
struct ThreeAtom {
  std::vector<ThetaPoint> atoms{{0.0}, {1.0}, {2.0}};
  DiscreteBelief belief{atoms, {0.5, 0.3, 0.2}};
  CostOracle cost = cost_table(atoms, {{1, 2}, {4, 0}, {10, 5}});
};

}  // namespace

TEST_CASE("expected_cost examples") {
  const auto point = DiscreteBelief::point_mass({7.0});
  CHECK(expected_cost(point, [](const ThetaPoint&, std::size_t) { return 3.5; }, 0) == 3.5);

  const DiscreteBelief half({{0.0}, {1.0}}, {0.5, 0.5});
  CHECK(expected_cost(half, [](const ThetaPoint& t, std::size_t) { return t[0]; }, 0) ==
        doctest::Approx(0.5).epsilon(1e-12));

  ThreeAtom f;
  // 0.5*1 + 0.3*4 + 0.2*10
  CHECK(expected_cost(f.belief, f.cost, 0) == doctest::Approx(3.7).epsilon(1e-12));
}

TEST_CASE("expected_cost errors") {
  const auto point = DiscreteBelief::point_mass({1.0, 2.0});
  CHECK_THROWS_AS(DiscreteBelief(std::vector<ThetaPoint>{}, std::vector<double>{}), Error);
  try {
    expected_cost(point, [](const ThetaPoint&, std::size_t) { return std::nan(""); }, 3);
    FAIL("expected a numeric error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNumeric);
    CHECK(std::string(e.what()).find("(1,2)") != std::string::npos);
    CHECK(std::string(e.what()).find("action=3") != std::string::npos);
  }
}

TEST_CASE("ibr_action examples") {
  const auto point = DiscreteBelief::point_mass({0.0});
  const std::vector<double> costs{3, 1, 2};
  CHECK(ibr_action(point, ActionSet::of_size(3),
                   [&](const ThetaPoint&, std::size_t a) { return costs[a]; }) == 1);

  const auto sym = symmetric_binary({});
  CHECK(ibr_action(binary_prior(), sym.actions, sym.cost) == 0);

  ThreeAtom f;
  CHECK(expected_cost(f.belief, f.cost, 1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(ibr_action(f.belief, ActionSet::of_size(2), f.cost) == 1);
}

TEST_CASE("mocu examples") {
  const auto sym = symmetric_binary({});
  CHECK(core::mocu(DiscreteBelief::point_mass({1.0}), sym.actions, sym.cost) == 0.0);
  CHECK(core::mocu(binary_prior(), sym.actions, sym.cost) == doctest::Approx(0.5).epsilon(1e-12));
  ThreeAtom f;
  // E[C(psi_IBR)] = 2.0, E[min] = 0.5*1 + 0.3*0 + 0.2*5 = 1.5
  CHECK(core::mocu(f.belief, ActionSet::of_size(2), f.cost) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("engine model matches the direct functions") {
  ThreeAtom f;
  DesignProblem p{ActionSet::of_size(2), {uninformative_experiment()}, f.cost};
  const DiscreteModel model(p, f.belief);
  const EvalContext ctx;
  CHECK(core::mocu(model, f.belief, ctx).value == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(core::ibr_action(model, f.belief, ctx).action == 1);
}

TEST_CASE("remaining_mocu examples") {
  const EvalContext ctx;
  const auto prior = binary_prior();

  SUBCASE("perfect experiment") {
    const DiscreteModel m(symmetric_binary({perfect_binary_experiment(0)}), prior);
    CHECK(remaining_mocu(m, prior, 0, 0.0, ctx).value == 0.0);
    CHECK(remaining_mocu(m, prior, 0, 1.0, ctx).value == 0.0);
  }
  SUBCASE("uninformative experiment") {
    const DiscreteModel m(symmetric_binary({uninformative_experiment()}), prior);
    CHECK(remaining_mocu(m, prior, 0, 0.0, ctx).value ==
          doctest::Approx(core::mocu(m, prior, ctx).value).epsilon(1e-12));
  }
  SUBCASE("delta = 0.1, outcome 0") {
    const DiscreteModel m(symmetric_binary({noisy_binary_experiment(0, 0.1)}), prior);
    const DiscreteBelief post = m.update(prior, 0, 0.0);
    CHECK(post.weight(0) == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(post.weight(1) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(remaining_mocu(m, prior, 0, 0.0, ctx).value == doctest::Approx(0.1).epsilon(1e-12));
    // input belief untouched
    CHECK(prior.weight(0) == 0.5);
  }
  SUBCASE("impossible outcome") {
    const DiscreteBelief certain({{0.0}, {1.0}}, {1.0, 0.0});
    const DiscreteModel m(symmetric_binary({perfect_binary_experiment(0)}), certain);
    try {
      remaining_mocu(m, certain, 0, 1.0, ctx);
      FAIL("expected impossible-outcome");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kImpossibleOutcome);
    }
  }
  SUBCASE("outcome outside the support") {
    const DiscreteModel m(symmetric_binary({perfect_binary_experiment(0)}), prior);
    CHECK_THROWS_AS(remaining_mocu(m, prior, 0, 2.0, ctx), Error);
  }
}

TEST_CASE("design_value examples") {
  const EvalContext ctx;
  const auto prior = binary_prior();
  const DiscreteModel m(symmetric_binary({perfect_binary_experiment(0), uninformative_experiment(),
                                          noisy_binary_experiment(0, 0.1)}),
                        prior);
  CHECK(design_value(m, prior, 0, ctx).value == doctest::Approx(0.0));
  CHECK(design_value(m, prior, 1, ctx).value == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(design_value(m, prior, 2, ctx).value == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("design_value equals the outcome-weighted remaining MOCU") {
  std::mt19937_64 rng(11);
  const EvalContext ctx;
  for (int trial = 0; trial < 200; ++trial) {
    const auto r = testing::random_discrete_problem(rng);
    const auto prior = r.belief();
    const DiscreteModel m(r.problem(), prior);
    for (std::size_t e = 0; e < m.experiment_count(); ++e) {
      double weighted = 0.0;
      for (const auto& o : m.outcomes(prior, e, ctx).items)
        weighted += o.weight * remaining_mocu(m, prior, e, o.value, ctx).value;
      CHECK(design_value(m, prior, e, ctx).value == doctest::Approx(weighted).epsilon(1e-10));
      CHECK(design_value(m, prior, e, ctx).value ==
            doctest::Approx(testing::brute_force_design_value(r, e)).epsilon(1e-10));
    }
  }
}

TEST_CASE("select_experiment examples") {
  const EvalContext ctx;
  const auto prior = binary_prior(0.4);
  SUBCASE("perfect beats uninformative") {
    const DiscreteModel m(symmetric_binary({uninformative_experiment(), perfect_binary_experiment(0)}),
                          prior);
    const Selection s = select_experiment(m, prior, ctx);
    CHECK(s.experiment == 1);
    CHECK(s.design_value.value == doctest::Approx(0.0));
    CHECK(s.mocu_reduction == doctest::Approx(-0.4).epsilon(1e-12));
  }
  SUBCASE("all uninformative ties to index 0") {
    const DiscreteModel m(symmetric_binary({uninformative_experiment(), uninformative_experiment()}),
                          prior);
    const Selection s = select_experiment(m, prior, ctx);
    CHECK(s.experiment == 0);
    CHECK(s.mocu_reduction == doctest::Approx(0.0));
  }
  SUBCASE("delta 0.1 beats delta 0.3") {
    const auto half = binary_prior();
    const DiscreteModel m(symmetric_binary({noisy_binary_experiment(0, 0.3),
                                            noisy_binary_experiment(0, 0.1)}),
                          half);
    const Selection s = select_experiment(m, half, ctx);
    CHECK(s.experiment == 1);
    CHECK(design_value(m, half, 0, ctx).value == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(s.design_value.value == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(s.mocu_reduction == doctest::Approx(-0.4).epsilon(1e-12));
  }
}

TEST_CASE("run_design_loop examples") {
  const auto prior = binary_prior();
  const auto problem = symmetric_binary({perfect_binary_experiment(0)});
  const DiscreteModel m(problem, prior);
  int calls = 0;
  Environment<double> env = [&](std::size_t, std::size_t) {
    ++calls;
    return 1.0;
  };

  SUBCASE("budget 0") {
    LoopConfig cfg;
    cfg.budget = 0;
    auto r = run_design_loop(m, prior, cfg, env);
    CHECK(r.trace.steps.empty());
    CHECK(r.trace.initial_best_action == 0);
    CHECK(r.trace.initial_mocu.value == doctest::Approx(0.5));
    CHECK(calls == 0);
  }
  SUBCASE("single atom stops before step 1") {
    const auto point = DiscreteBelief::point_mass({1.0});
    const DiscreteModel pm(problem, point);
    LoopConfig cfg;
    cfg.budget = 10;
    auto r = run_design_loop(pm, point, cfg, env);
    CHECK(r.trace.steps.empty());
    CHECK(r.trace.stop == StopReason::kThreshold);
    CHECK(calls == 0);
  }
  SUBCASE("perfect experiment stops after exactly one observation") {
    LoopConfig cfg;
    cfg.budget = 5;
    auto r = run_design_loop(m, prior, cfg, env);
    REQUIRE(r.trace.steps.size() == 1);
    CHECK(r.trace.steps[0].experiment == 0);
    CHECK(r.trace.steps[0].outcome == 1.0);
    CHECK(r.trace.steps[0].best_action == 1);
    CHECK(r.trace.steps[0].mocu.value == 0.0);
    CHECK(r.trace.stop == StopReason::kThreshold);
    CHECK(r.belief.weight(1) == 1.0);
  }
  SUBCASE("environment failure carries the step index") {
    LoopConfig cfg;
    cfg.budget = 3;
    Environment<double> bad = [](std::size_t, std::size_t) -> double {
      throw std::runtime_error("sensor offline");
    };
    try {
      run_design_loop(m, prior, cfg, bad);
      FAIL("expected an environment error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kEnvironment);
      CHECK(std::string(e.what()).find("step 1") != std::string::npos);
    }
  }
  SUBCASE("restriction callback shrinks the experiment set per step") {
    // Two noisy experiments on the same bit; each may be used once.
    const DiscreteModel two(symmetric_binary({noisy_binary_experiment(0, 0.2),
                                              noisy_binary_experiment(0, 0.1)}),
                            prior);
    std::vector<std::size_t> used;
    Restricted<DiscreteModel> restricted(
        two, nullptr, [&](const DiscreteBelief&) {
          std::vector<std::size_t> out;
          for (std::size_t e = 0; e < 2; ++e)
            if (std::find(used.begin(), used.end(), e) == used.end()) out.push_back(e);
          return out;
        });
    LoopConfig cfg;
    cfg.budget = 5;
    cfg.stop_threshold = 0.0;
    Environment<double> record = [&](std::size_t, std::size_t e) {
      used.push_back(e);
      return 0.0;
    };
    auto r = run_design_loop(restricted, prior, cfg, record);
    REQUIRE(r.trace.steps.size() == 2);
    CHECK(r.trace.steps[0].experiment == 1);
    CHECK(r.trace.steps[1].experiment == 0);
    CHECK(r.trace.stop == StopReason::kExhausted);
  }
}

TEST_CASE("continuous outcomes use seeded per-experiment substreams") {
  // Gaussian measurement of a scalar theta with two noise levels.
  auto gauss = [](double sd) {
    return Experiment::continuous(
        [sd](const ThetaPoint& t, Rng& rng) { return std::normal_distribution<double>(t[0], sd)(rng); },
        [sd](const ThetaPoint& t, double y) { return -0.5 * (y - t[0]) * (y - t[0]) / (sd * sd); });
  };
  DesignProblem p;
  p.actions = ActionSet::of_size(3);
  p.cost = [](const ThetaPoint& t, std::size_t a) { return std::abs(t[0] - static_cast<double>(a)); };
  p.experiments = {gauss(0.5), gauss(3.0)};
  const DiscreteBelief prior = DiscreteBelief::uniform({{0.0}, {1.0}, {2.0}});
  const DiscreteModel m(p, prior);
  EvalConfig cfg;
  cfg.mc_outcome_samples = 400;
  cfg.seed = 99;
  const EvalContext ctx(cfg, 4);
  const Selection a = select_experiment(m, prior, ctx);
  const Selection b = select_experiment(m, prior, ctx);
  CHECK(a.experiment == 0);
  CHECK(a.lookahead == b.lookahead);
  CHECK(a.design_value.std_error > 0.0);
  // Distinct experiments draw from distinct streams.
  const auto o0 = m.outcomes(prior, 0, ctx).items;
  const auto o1 = m.outcomes(prior, 1, ctx).items;
  CHECK(o0.front().value != o1.front().value);

  SUBCASE("degeneracy guard") {
    const DiscreteModel strict(p, prior, ParticleUpdateOptions{2.0});
    CHECK_THROWS_AS(strict.update(prior, 0, 0.0), Error);
  }
}

// ---------------------------------------------------------------------------
// Properties

TEST_CASE("property: MOCU nonnegative, information never hurts, posterior consistency") {
  std::mt19937_64 rng(2024);
  const EvalContext ctx;
  for (int trial = 0; trial < 500; ++trial) {
    const auto r = testing::random_discrete_problem(rng);
    const auto prior = r.belief();
    const DiscreteModel m(r.problem(), prior);
    const double base = core::mocu(m, prior, ctx).value;
    CHECK(base >= -1e-10);
    for (std::size_t e = 0; e < m.experiment_count(); ++e) {
      CHECK(design_value(m, prior, e, ctx).value <= base + 1e-10);
      std::vector<double> mix(prior.size(), 0.0);
      for (const auto& o : m.outcomes(prior, e, ctx).items) {
        const auto post = m.update(prior, e, o.value);
        CHECK(remaining_mocu(m, prior, e, o.value, ctx).value >= -1e-10);
        for (std::size_t i = 0; i < mix.size(); ++i) mix[i] += o.weight * post.weight(i);
      }
      for (std::size_t i = 0; i < mix.size(); ++i) CHECK(std::abs(mix[i] - prior.weight(i)) < 1e-12);
    }
  }
}

TEST_CASE("property: point-mass beliefs have zero MOCU and zero design value") {
  std::mt19937_64 rng(7);
  const EvalContext ctx;
  for (int trial = 0; trial < 100; ++trial) {
    auto r = testing::random_discrete_problem(rng);
    std::uniform_int_distribution<std::size_t> pick(0, r.atoms.size() - 1);
    const std::size_t k = pick(rng);
    std::vector<double> w(r.atoms.size(), 0.0);
    w[k] = 1.0;
    const DiscreteBelief point(r.atoms, w);
    const DiscreteModel m(r.problem(), point);
    CHECK(core::mocu(m, point, ctx).value == 0.0);
    for (std::size_t e = 0; e < m.experiment_count(); ++e)
      CHECK(design_value(m, point, e, ctx).value == doctest::Approx(0.0));
  }
}

TEST_CASE("property: selections are deterministic") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto r = testing::random_discrete_problem(rng);
    const DiscreteModel m(r.problem(), r.belief());
    const Selection a = select_experiment(m, r.belief(), EvalContext{});
    const Selection b = select_experiment(m, r.belief(), EvalContext{});
    CHECK(a.experiment == b.experiment);
    CHECK(a.design_value.value == b.design_value.value);
  }
}

TEST_CASE("property: Monte-Carlo MOCU converges on the three-atom instance") {
  ThreeAtom f;
  const double exact = core::mocu(f.belief, ActionSet::of_size(2), f.cost);
  int within = 0;
  for (std::uint64_t rep = 0; rep < 100; ++rep) {
    Rng rng = make_rng(31337, {rep});
    const Estimate est = mocu_monte_carlo(f.belief, ActionSet::of_size(2), f.cost, 100000, rng);
    if (std::abs(est.value - exact) < 3.0 * est.std_error) ++within;
  }
  CHECK(within >= 99);
}
