#include <algorithm>
#include <cmath>
#include <random>

#include "core/engine.hpp"
#include "core/error.hpp"
#include "doctest.h"
#include "scenarios/surrogate.hpp"

using mocu::Error;
using mocu::ErrorCode;
using mocu::make_rng;
using namespace mocu::surrogate;
namespace core = mocu::core;

namespace {

SurrogateBelief belief_of(const std::vector<std::vector<std::pair<core::ThetaPoint, double>>>& spec) {
  SurrogateBelief b;
  for (const auto& d : spec) {
    std::vector<core::ThetaPoint> atoms;
    std::vector<double> w;
    for (const auto& [t, v] : d) {
      atoms.push_back(t);
      w.push_back(v);
    }
    b.dopants.emplace_back(atoms, w);
  }
  return b;
}

SurrogateProblem problem(std::size_t n, std::vector<double> concs, double tau) {
  SurrogateProblem p;
  p.dopants = n;
  p.concentrations = std::move(concs);
  p.tau = tau;
  return p;
}

// Instances frozen from tests/oracles/surrogate_quadrature.py.
SurrogateBelief two_by_one() {
  return belief_of({{{{1.0, 0.5}, 0.6}, {{2.0, 1.0}, 0.4}}, {{{1.2, 0.0}, 0.5}, {{0.8, 0.9}, 0.5}}});
}

SurrogateBelief three_by_two() {
  return belief_of({{{{0.0, 0.0}, 0.1}, {{1.0, 0.5}, 0.2}, {{2.0, 1.0}, 0.3}, {{0.5, 0.2}, 0.4}},
                    {{{1.5, 0.5}, 0.25}, {{0.2, 0.8}, 0.25}, {{1.0, 1.5}, 0.25}, {{3.0, 0.0}, 0.25}},
                    {{{0.7, 0.6}, 0.4}, {{1.1, 0.4}, 0.3}, {{2.5, 0.5}, 0.2}, {{0.0, 1.0}, 0.1}}});
}

SurrogateBelief random_belief(std::mt19937_64& rng, std::size_t n, std::size_t particles) {
  SurrogateBelief b;
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto atoms = sample_particles(particles, -1.0, 3.0, -0.5, 1.5, rng);
    std::vector<double> w(particles);
    for (double& v : w) v = u(rng);
    b.dopants.emplace_back(atoms, w);
  }
  return b;
}

SurrogateProblem with_quadrature(SurrogateProblem p, std::size_t order) {
  p.outcome_rule = OutcomeRule::kGaussHermite;
  p.quadrature_order = order;
  return p;
}

}  // namespace

TEST_CASE("default surrogate") {
  const QuadraticSurrogate g{2.0, 3.0, 0.25, 0.5};
  CHECK(g(1.0, 1.0, 0.5) == doctest::Approx(0.0 + 3.0 * 0.5625 + 0.25));
  CHECK(QuadraticSurrogate{}(1.0, 0.5, 1.0) == doctest::Approx(0.1));
}

TEST_CASE("surrogate_ibr examples") {
  SUBCASE("point masses reduce to the argmin of g") {
    const auto b = belief_of({{{{2.0, 0.5}, 1.0}}, {{{0.4, 0.1}, 1.0}}});
    const auto p = problem(2, {0.5, 1.0, 1.5}, 1.0);
    double best = 1e300;
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        const auto& t = b.dopants[i].atom(0);
        const double v = p.g(t[0], t[1], p.concentrations[j]);
        if (v < best) best = v, bi = i, bj = j;
      }
    const Candidate c = surrogate_ibr(p, b);
    CHECK(c.dopant == bi);
    CHECK(c.concentration == bj);
    CHECK(c.expected_cost == best);
  }
  SUBCASE("dominant dopant wins at its best concentration") {
    // Dopant 1 is dopant 0 shifted so that g is lower everywhere (r on c3).
    const auto b = belief_of({{{{1.0, 2.0}, 0.5}, {{1.5, 1.8}, 0.5}}, {{{1.0, 0.5}, 0.5}, {{1.5, 0.5}, 0.5}}});
    const Candidate c = surrogate_ibr(problem(2, {0.5, 1.0, 1.5}, 1.0), b);
    CHECK(c.dopant == 1);
    CHECK(c.concentration == 1);
  }
  SUBCASE("3 x 2 weighted means") {
    const auto costs = expected_costs(problem(3, {0.5, 1.5}, 0.3), three_by_two());
    const std::vector<double> expect{0.9359999999999999, 1.036, 2.2824999999999998, 1.5325, 1.0310000000000001, 0.911};
    for (std::size_t k = 0; k < expect.size(); ++k) CHECK(costs[k] == doctest::Approx(expect[k]).epsilon(1e-14));
    const Candidate c = surrogate_ibr(problem(3, {0.5, 1.5}, 0.3), three_by_two());
    CHECK(c.dopant == 2);
    CHECK(c.concentration == 1);
  }
  SUBCASE("ties go to the lowest pair") {
    const auto b = belief_of({{{{1.0, 0.5}, 1.0}}, {{{1.0, 0.5}, 1.0}}});
    const Candidate c = surrogate_ibr(problem(2, {1.0, 1.0}, 1.0), b);
    CHECK(c.dopant == 0);
    CHECK(c.concentration == 0);
  }
}

TEST_CASE("surrogate_design_policy matches the quadrature oracle") {
  const core::EvalContext ctx;
  SUBCASE("2 x 1, tau = 0.01") {
    const auto p = with_quadrature(problem(2, {1.0}, 0.01), 1);
    const auto d = surrogate_design_policy(p, two_by_one(), ctx);
    CHECK(d.current_ibr_cost == doctest::Approx(0.34500000000000003).epsilon(1e-14));
    CHECK(d.values[0] == doctest::Approx(0.198).epsilon(1e-12));
    CHECK(d.values[1] == doctest::Approx(0.34500000000000003).epsilon(1e-12));
    CHECK(d.experiment.dopant == 0);
  }
  SUBCASE("3 x 2, tau = 0.3") {
    const auto p = with_quadrature(problem(3, {0.5, 1.5}, 0.3), 1);
    const auto d = surrogate_design_policy(p, three_by_two(), ctx);
    const std::vector<double> expect{0.3573427467212118, 0.507726195264596, 0.6825865554611088,
                                     0.66497288510156,   0.40586249792221474, 0.6707778387283101};
    for (std::size_t k = 0; k < expect.size(); ++k) CHECK(d.values[k] == doctest::Approx(expect[k]).epsilon(1e-12));
    CHECK(d.experiment.dopant == 0);
    CHECK(d.experiment.concentration == 0);
  }
}

TEST_CASE("surrogate_design_policy examples") {
  const core::EvalContext ctx({256, 200, 5});
  SUBCASE("huge tau is uninformative") {
    const auto p = problem(3, {0.5, 1.5}, 1e9);
    const auto d = surrogate_design_policy(p, three_by_two(), ctx);
    for (double v : d.values) CHECK(std::abs(v - d.current_ibr_cost) < 1e-9);
    CHECK(d.experiment.dopant == 0);
    CHECK(d.experiment.concentration == 0);
  }
  SUBCASE("point masses: no reduction") {
    const auto b = belief_of({{{{2.0, 0.5}, 1.0}}, {{{0.4, 0.1}, 1.0}}});
    const auto d = surrogate_design_policy(problem(2, {0.5, 1.5}, 0.2), b, ctx);
    CHECK(d.experiment.dopant == 0);
    CHECK(d.experiment.concentration == 0);
    for (double v : d.values) CHECK(v == doctest::Approx(d.current_ibr_cost).epsilon(1e-14));
  }
}

TEST_CASE("property: policy and engine agree") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + trial % 3;
    auto p = problem(n, {0.5, 1.0, 2.0}, 0.05 + 0.5 * (trial % 4));
    if (trial % 2) p = with_quadrature(p, 3);
    const auto b = random_belief(rng, n, 6);
    const core::EvalContext ctx({64, 32, static_cast<std::uint64_t>(trial)}, 1);
    const SurrogateModel model(p);
    const auto sel = core::select_experiment(model, b, ctx);
    const auto d = surrogate_design_policy(p, b, ctx);
    CHECK(sel.current_ibr_cost == doctest::Approx(d.current_ibr_cost).epsilon(1e-14));
    for (std::size_t e = 0; e < p.pair_count(); ++e) CHECK(std::abs(sel.lookahead[e] - d.values[e]) < 1e-12);
    CHECK(sel.experiment == p.pair_index(d.experiment.dopant, d.experiment.concentration));
  }
}

TEST_CASE("expected optimal cost equals the joint enumeration") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const auto p = problem(n, {0.5, 1.5, 2.5}, 1.0);
    const auto b = random_belief(rng, n, 4);
    double brute = 0.0;
    std::vector<std::size_t> idx(n, 0);
    for (;;) {
      double w = 1.0, m = 1e300;
      for (std::size_t i = 0; i < n; ++i) {
        w *= b.dopants[i].weight(idx[i]);
        const auto& t = b.dopants[i].atom(idx[i]);
        for (double o : p.concentrations) m = std::min(m, p.g(t[0], t[1], o));
      }
      brute += w * m;
      std::size_t i = 0;
      while (i < n && ++idx[i] == 4) idx[i++] = 0;
      if (i == n) break;
    }
    const core::EvalContext ctx;
    CHECK(SurrogateModel(p).expected_optimal_cost(b, ctx).value == doctest::Approx(brute).epsilon(1e-12));
  }
}

TEST_CASE("property: update factorizes across dopants") {
  std::mt19937_64 rng(5);
  const auto p = problem(3, {0.5, 1.5}, 0.2);
  const auto b = random_belief(rng, 3, 10);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto post = surrogate_update(p, b, i, 1, 0.7);
    for (std::size_t k = 0; k < 3; ++k)
      if (k != i) CHECK(post.dopants[k].weights() == b.dopants[k].weights());
    CHECK(post.dopants[i].weights() != b.dopants[i].weights());
  }
}

TEST_CASE("property: tiny tau collapses the measured dopant") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = problem(2, {0.5, 1.5}, 1e-4);
    const auto b = random_belief(rng, 2, 25);
    auto truth_rng = make_rng(trial, {1});
    const auto truth = sample_truth(b, truth_rng);
    const double y = measure(p, truth, 0, 1, truth_rng);
    const auto post = surrogate_update(p, b, 0, 1, y);
    const auto& w = post.dopants[0].weights();
    CHECK(*std::max_element(w.begin(), w.end()) >= 0.99);
  }
}

TEST_CASE("policy is reproducible per seed") {
  std::mt19937_64 rng(12);
  const auto p = problem(3, {0.5, 1.0}, 0.5);
  const auto b = random_belief(rng, 3, 25);
  const auto a = surrogate_design_policy(p, b, core::EvalContext({64, 64, 1}));
  const auto a2 = surrogate_design_policy(p, b, core::EvalContext({64, 64, 1}));
  const auto c = surrogate_design_policy(p, b, core::EvalContext({64, 64, 2}));
  CHECK(a.values == a2.values);
  CHECK(a.values != c.values);
}

TEST_CASE("surrogate errors") {
  const auto b = two_by_one();
  SUBCASE("degeneracy guard") {
    auto p = with_quadrature(problem(2, {1.0}, 0.01), 1);
    p.min_effective_sample_size = 2.0;
    try {
      surrogate_design_policy(p, b, core::EvalContext{});
      FAIL("expected degeneracy");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kDegenerate);
    }
    CHECK_THROWS_AS(surrogate_update(p, b, 0, 0, 0.1), Error);
  }
  SUBCASE("bad problem") {
    CHECK_THROWS_AS(problem(2, {1.0}, 0.0).validate(), Error);
    CHECK_THROWS_AS(SurrogateModel(problem(2, {}, 1.0)), Error);
    CHECK_THROWS_AS(expected_costs(problem(3, {1.0}, 1.0), b), Error);
  }
}
