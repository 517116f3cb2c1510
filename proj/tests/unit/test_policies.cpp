#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "beliefs/gaussian.hpp"
#include "core/engine.hpp"
#include "core/quadrature.hpp"
#include "doctest.h"
#include "policies/ego.hpp"
#include "policies/expected_max.hpp"
#include "policies/kg.hpp"
#include "policies/ranking_model.hpp"

using namespace mocu::policies;
using mocu::Error;
using mocu::ErrorCode;
using mocu::beliefs::CorrelatedGaussianBelief;
using mocu::beliefs::IndependentGaussianBelief;
namespace core = mocu::core;

namespace {

const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

struct McResult {
  double mean, se;
};

template <class F>
McResult monte_carlo(std::size_t n, std::uint64_t seed, F&& f) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  double s = 0, s2 = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double v = f(z, rng);
    s += v;
    s2 += v * v;
  }
  const double m = s / n;
  return {m, std::sqrt((s2 / n - m * m) / (n - 1))};
}

CorrelatedGaussianBelief random_belief(std::mt19937_64& rng, int n, bool noise_free) {
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.05, 2.0);
  Eigen::MatrixXd f(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) f(i, j) = z(rng);
  Eigen::MatrixXd s = f * f.transpose() / n + 0.05 * Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd m(n), noise(n);
  for (int i = 0; i < n; ++i) {
    m[i] = z(rng);
    noise[i] = noise_free ? 0.0 : u(rng);
  }
  return {m, s, noise};
}

}  // namespace

TEST_CASE("expected_max_affine examples") {
  CHECK(expected_max_affine(std::vector<double>{1, 5, 3}, std::vector<double>{2, 2, 2}) == 5.0);
  CHECK(expected_max_affine(std::vector<double>{0, 0}, std::vector<double>{0, 1}) ==
        doctest::Approx(kInvSqrt2Pi).epsilon(1e-14));
  // E|Z| = 2 phi(0)
  CHECK(expected_max_affine(std::vector<double>{0, 0}, std::vector<double>{-1, 1}) ==
        doctest::Approx(2 * kInvSqrt2Pi).epsilon(1e-14));
  // one line
  CHECK(expected_max_affine(std::vector<double>{-2}, std::vector<double>{7}) == -2.0);
  // duplicate and dominated lines do not change the value
  CHECK(expected_max_affine(std::vector<double>{0, 0, -10, 0}, std::vector<double>{0, 1, 0.5, 1}) ==
        doctest::Approx(kInvSqrt2Pi).epsilon(1e-14));
  // far-away intercepts
  CHECK(expected_max_affine(std::vector<double>{1e9, 1e9}, std::vector<double>{0, 1}) ==
        doctest::Approx(1e9 + kInvSqrt2Pi).epsilon(1e-15));
  CHECK(expected_max_affine_excess(std::vector<double>{1e9, 1e9}, std::vector<double>{0, 1}) ==
        doctest::Approx(kInvSqrt2Pi).epsilon(1e-12));
  CHECK_THROWS_AS(expected_max_affine(std::vector<double>{}, std::vector<double>{}), Error);
  CHECK_THROWS_AS(expected_max_affine(std::vector<double>{1}, std::vector<double>{1, 2}), Error);
}

TEST_CASE("expected_max_affine matches Monte Carlo on random pencils") {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<double> a(5), b(5);
    for (int j = 0; j < 5; ++j) {
      a[j] = g(rng);
      b[j] = 2.0 * g(rng);
    }
    const double exact = expected_max_affine(a, b);
    const auto mc = monte_carlo(10000000, 100 + trial, [&](auto& z, auto& r) {
      const double x = z(r);
      double best = -1e300;
      for (int j = 0; j < 5; ++j) best = std::max(best, a[j] + b[j] * x);
      return best;
    });
    CHECK(std::abs(mc.mean - exact) < 4.0 * mc.se);
  }
}

TEST_CASE("upper_envelope keeps the lowest index on exact ties") {
  const std::vector<double> a{0, 0, 1}, b{1, 1, 0};
  const PencilEnvelope env = upper_envelope(a, b);
  REQUIRE(env.lines.size() == 2);
  CHECK(env.lines[0] == 2);
  CHECK(env.lines[1] == 0);
  CHECK(env.breakpoints[0] == doctest::Approx(1.0));
}

TEST_CASE("expected_max_affine_t") {
  const std::vector<double> a{0, 0}, b{0, 1};
  // E[max(0, T)] for T ~ t(nu): sqrt(nu) Gamma((nu-1)/2) / (2 sqrt(pi) Gamma(nu/2))
  for (double nu : {1.5, 3.0, 10.0, 60.0}) {
    const double expect =
        std::sqrt(nu) * std::tgamma((nu - 1) / 2) / (2 * std::sqrt(std::numbers::pi) * std::tgamma(nu / 2));
    CHECK(expected_max_affine_t(a, b, nu) == doctest::Approx(expect).epsilon(1e-10));
  }
  CHECK(std::isinf(expected_max_affine_t(a, b, 1.0)));
  CHECK(expected_max_affine_t(std::vector<double>{1, 3}, std::vector<double>{2, 2}, 1.0) == 3.0);
  // large dof approaches the normal value
  CHECK(expected_max_affine_t(a, b, 1e7) == doctest::Approx(kInvSqrt2Pi).epsilon(1e-6));
}

TEST_CASE("kg_value examples") {
  SUBCASE("known reward") {
    Eigen::MatrixXd s(2, 2);
    s << 0, 0, 0, 1;
    const CorrelatedGaussianBelief b(Eigen::Vector2d(0.3, 0.0), s, Eigen::VectorXd::Ones(2));
    CHECK(kg_value(b, 0) == 0.0);
  }
  SUBCASE("symmetric instance") {
    const CorrelatedGaussianBelief b(Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2),
                                     Eigen::VectorXd::Ones(2));
    CHECK(kg_value(b, 0) == kg_value(b, 1));
    CHECK(kg_policy(b).experiment == 0);
  }
  SUBCASE("Monte Carlo over prior draws and explicit updates") {
    const IndependentGaussianBelief ind{{1.0, 0.0}, {1.0, 4.0}, {1.0, 1.0}};
    const auto b = CorrelatedGaussianBelief::from_independent(ind);
    const double value = kg_value(b, 1);
    CHECK(kg_value(ind, 1) == doctest::Approx(value).epsilon(1e-14));
    const auto mc = monte_carlo(1000000, 9, [&](auto& z, auto& r) {
      const double theta = ind.means[1] + std::sqrt(ind.variances[1]) * z(r);
      const double y = theta + std::sqrt(ind.noise[1]) * z(r);
      const auto post = mocu::beliefs::gaussian_update_independent(ind, 1, y);
      return std::max(post.means[0], post.means[1]) - 1.0;
    });
    CHECK(std::abs(mc.mean - value) < 4.0 * mc.se);
  }
}

TEST_CASE("kg_policy examples") {
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(3, 3);
  s(0, 0) = 0.0;
  const CorrelatedGaussianBelief b(Eigen::VectorXd::Zero(3), s, Eigen::VectorXd::Ones(3));
  const KgDecision d = kg_policy(b);
  CHECK(d.experiment == 1);
  CHECK(d.values[0] == 0.0);
  CHECK(d.values[1] > 0.0);
}

TEST_CASE("property: kg_value nonnegative and shift invariant") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const auto b = random_belief(rng, 6, false);
    const CorrelatedGaussianBelief shifted(b.mean().array() + 123.25, b.covariance(), b.noise());
    for (std::size_t i = 0; i < 6; ++i) {
      const double v = kg_value(b, i);
      CHECK(v >= -1e-12);
      CHECK(kg_value(shifted, i) == doctest::Approx(v).epsilon(1e-9).scale(1e-9));
    }
  }
}

TEST_CASE("KG equals the MOCU engine on the ranking model") {
  std::mt19937_64 rng(1234);
  const core::EvalContext ctx;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 3 + trial % 6;
    const auto b = random_belief(rng, n, false);
    const auto state = RankingState::unobserved(b);
    const GaussianRankingModel closed(n);
    const GaussianRankingModel quadrature(n, GaussianRankingModel::Mode::kAllActions,
                                          GaussianRankingModel::Lookahead::kGaussHermite, 96);
    const KgDecision kg = kg_policy(b);
    const core::Selection sel = core::select_experiment(closed, state, ctx, false);
    CHECK(sel.experiment == kg.experiment);
    CHECK(sel.current_ibr_action == static_cast<std::size_t>(std::max_element(b.mean().begin(), b.mean().end()) - b.mean().begin()));
    const core::Selection gh = core::select_experiment(quadrature, state, ctx, false);
    const double max_m = b.mean().maxCoeff();
    for (int i = 0; i < n; ++i) {
      // the engine reduction equals minus the KG value
      // both routes share the envelope routine, so the values agree exactly
      CHECK(-sel.reduction[i] == kg.values[i]);
      CHECK(std::abs(-sel.lookahead[i] - max_m - kg.values[i]) < 1e-12 * (1 + std::abs(max_m)));
      // quadrature over a kinked integrand: slow but independent
      CHECK(std::abs(gh.lookahead[i] - sel.lookahead[i]) < 5e-3);
    }
  }
}

TEST_CASE("expected improvement examples") {
  CHECK(expected_improvement(2.0, 1.0, 2.0) == doctest::Approx(kInvSqrt2Pi).epsilon(1e-14));
  CHECK(expected_improvement(1.0, 0.0, 2.0) == 0.0);
  CHECK(expected_improvement(3.0, 0.0, 2.0) == 1.0);
  const double f = 0.7;
  const double closed = expected_improvement(f + 1.0, 2.0, f);
  const auto mc = monte_carlo(1000000, 5, [&](auto& z, auto& r) {
    return std::max(f + 1.0 + 2.0 * z(r) - f, 0.0);
  });
  CHECK(std::abs(mc.mean - closed) < 4.0 * mc.se);
  CHECK_THROWS_AS(expected_improvement(0.0, -1.0, 0.0), Error);
}

TEST_CASE("property: EI monotone in mu and s") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-3, 3), pos(0.01, 3);
  for (int trial = 0; trial < 1000; ++trial) {
    const double mu = u(rng), s = pos(rng), f = u(rng), d = pos(rng);
    CHECK(expected_improvement(mu + d, s, f) >= expected_improvement(mu, s, f));
    CHECK(expected_improvement(mu, s + d, f) >= expected_improvement(mu, s, f));
    if (mu <= f) CHECK(expected_improvement(mu, s + d, f) > expected_improvement(mu, s, f));
  }
}

TEST_CASE("ego_policy examples") {
  const CorrelatedGaussianBelief prior(Eigen::VectorXd::Zero(4), Eigen::MatrixXd::Identity(4, 4),
                                       Eigen::VectorXd::Zero(4));
  SUBCASE("identical candidates") {
    const ObservedSet obs{{1}, {0.5}};
    const auto state = RankingState::conditioned(prior, obs);
    const EgoDecision d = ego_policy(state.gaussian, obs);
    CHECK(d.experiment == 0);
    CHECK(d.best_action == 1);
    CHECK(std::isnan(d.values[1]));
  }
  SUBCASE("dominating candidate") {
    Eigen::VectorXd m = Eigen::VectorXd::Zero(4);
    m[3] = 0.4;
    const CorrelatedGaussianBelief b(m, Eigen::MatrixXd::Identity(4, 4), Eigen::VectorXd::Zero(4));
    const ObservedSet obs{{0}, {0.1}};
    CHECK(ego_policy(RankingState::conditioned(b, obs).gaussian, obs).experiment == 3);
  }
  SUBCASE("errors") {
    const ObservedSet all{{0, 1, 2, 3}, {1, 2, 3, 4}};
    try {
      ego_policy(prior, all);
      FAIL("expected exhausted");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kExhausted);
    }
    CHECK_THROWS_AS(ei_value(prior, 0, ObservedSet{{0}, {1.0}}), Error);
    CHECK_THROWS_AS(ObservedSet({{0, 0}, {1.0, 2.0}}).validate(4), Error);
  }
}

TEST_CASE("EGO equals the restricted noise-free MOCU engine") {
  std::mt19937_64 rng(4321);
  const core::EvalContext ctx;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 4 + trial % 5;
    const auto prior = random_belief(rng, n, true);
    // observe a random subset with rewards drawn from the prior
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::shuffle(idx.begin(), idx.end(), rng);
    const std::size_t k = 1 + trial % (n - 1);
    Eigen::LLT<Eigen::MatrixXd> llt(prior.covariance());
    std::normal_distribution<double> z(0.0, 1.0);
    Eigen::VectorXd draw(n);
    for (int i = 0; i < n; ++i) draw[i] = z(rng);
    const Eigen::VectorXd truth = prior.mean() + llt.matrixL() * draw;
    ObservedSet obs;
    for (std::size_t j = 0; j < k; ++j) {
      obs.indices.push_back(idx[j]);
      obs.rewards.push_back(truth[static_cast<Eigen::Index>(idx[j])]);
    }
    const auto state = RankingState::conditioned(prior, obs);
    const EgoDecision ego = ego_policy(state.gaussian, obs);
    const GaussianRankingModel model(n, GaussianRankingModel::Mode::kObservedOnly);
    const core::Selection sel = core::select_experiment(model, state, ctx, false);
    CHECK(sel.experiment == ego.experiment);
    CHECK(sel.current_ibr_action == ego.best_action);
    const double f = obs.best_reward();
    for (int i = 0; i < n; ++i) {
      if (obs.contains(i)) {
        CHECK(std::isnan(sel.lookahead[i]));
        continue;
      }
      // closed-form EI against the envelope of {f*, mu_i + s_i Z}
      CHECK(std::abs(-sel.reduction[i] - ego.values[i]) < 1e-12 * (1 + std::abs(f)));
    }
  }
}

TEST_CASE("EGO loop and the engine loop make the same choices") {
  std::mt19937_64 rng(99);
  const int n = 8;
  const auto prior = random_belief(rng, n, true);
  Eigen::VectorXd truth = prior.mean();
  truth[2] += 1.5;
  truth[6] -= 0.5;
  ObservedSet obs{{0}, {truth[0]}};

  core::LoopConfig cfg;
  cfg.budget = 5;
  cfg.stop_threshold = 0.0;
  cfg.track_mocu = false;
  const GaussianRankingModel model(n, GaussianRankingModel::Mode::kObservedOnly);
  const auto result = core::run_design_loop(
      model, RankingState::conditioned(prior, obs), cfg,
      core::Environment<double>([&](std::size_t, std::size_t e) { return truth[static_cast<Eigen::Index>(e)]; }));
  REQUIRE(result.trace.steps.size() == 5);
  for (const auto& step : result.trace.steps) {
    const EgoDecision d = ego_policy(RankingState::conditioned(prior, obs).gaussian, obs);
    CHECK(step.experiment == d.experiment);
    obs.indices.push_back(d.experiment);
    obs.rewards.push_back(truth[static_cast<Eigen::Index>(d.experiment)]);
    CHECK(step.best_action == obs.best_action());
  }
}

TEST_CASE("Gauss-Hermite rule integrates polynomials exactly") {
  const auto rule = core::gauss_hermite_normal(20);
  double m0 = 0, m2 = 0, m4 = 0, m6 = 0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double x = rule.nodes[q], w = rule.weights[q];
    m0 += w;
    m2 += w * x * x;
    m4 += w * std::pow(x, 4);
    m6 += w * std::pow(x, 6);
  }
  CHECK(m0 == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(m2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m4 == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(m6 == doctest::Approx(15.0).epsilon(1e-11));
}
