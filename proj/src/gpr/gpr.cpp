#include "gpr/gpr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "core/error.hpp"
#include "core/random.hpp"
#include "gpr/nelder_mead.hpp"

namespace mocu::gpr {

namespace {

Eigen::MatrixXd design(const std::vector<double>& x) {
  Eigen::MatrixXd phi(static_cast<Eigen::Index>(x.size()), 3);
  for (std::size_t i = 0; i < x.size(); ++i) phi.row(static_cast<Eigen::Index>(i)) << x[i] * x[i], x[i], 1.0;
  return phi;
}

Eigen::MatrixXd se_kernel(const std::vector<double>& a, const std::vector<double>& b, double ell) {
  Eigen::MatrixXd k(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double d = (a[i] - b[j]) / ell;
      k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::exp(-0.5 * d * d);
    }
  return k;
}

void check_inputs(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) fail(ErrorCode::kDomain, "points and targets differ in length");
  if (x.size() < 4) fail(ErrorCode::kDomain, "GPR needs at least 4 training points");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) fail(ErrorCode::kDomain, "non-finite training data");
  const Eigen::MatrixXd phi = design(x);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(phi);
  const Eigen::VectorXd sv = svd.singularValues();
  if (sv[2] <= 1e-9 * sv[0])
    fail(ErrorCode::kRank, "quadratic basis is rank deficient on the training points (need 3 distinct values)");
}

struct Fit {
  bool ok = false;
  double loglik = -std::numeric_limits<double>::infinity();
  Eigen::Vector3d beta, gradient;
  Eigen::MatrixXd chol;
  Eigen::VectorXd alpha;
};

Fit evaluate(const std::vector<double>& x, const std::vector<double>& y, const GprHyper& h,
             double jitter, bool want_gradient) {
  Fit f;
  const auto n = static_cast<Eigen::Index>(x.size());
  const double sf2 = std::exp(2.0 * h.log_signal_sd);
  const double ell = std::exp(h.log_length);
  const double sn2 = std::exp(2.0 * h.log_noise_sd);
  if (!std::isfinite(sf2) || !std::isfinite(ell) || !std::isfinite(sn2) || ell <= 0.0) return f;
  const Eigen::MatrixXd k = se_kernel(x, x, ell);
  const double jit = jitter * (sf2 + sn2);
  Eigen::MatrixXd kk = sf2 * k;
  kk.diagonal().array() += sn2 + jit;
  Eigen::LLT<Eigen::MatrixXd> llt(kk);
  if (llt.info() != Eigen::Success) return f;
  const Eigen::MatrixXd phi = design(x);
  const Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), n);
  const Eigen::MatrixXd kinv_phi = llt.solve(phi);
  const Eigen::Matrix3d a = phi.transpose() * kinv_phi;
  Eigen::LDLT<Eigen::Matrix3d> ldlt(a);
  if (ldlt.info() != Eigen::Success) return f;
  f.beta = ldlt.solve(kinv_phi.transpose() * yv);
  const Eigen::VectorXd r = yv - phi * f.beta;
  f.alpha = llt.solve(r);
  f.chol = llt.matrixL();
  const double logdet = 2.0 * f.chol.diagonal().array().log().sum();
  f.loglik = -0.5 * r.dot(f.alpha) - 0.5 * logdet - 0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
  if (!std::isfinite(f.loglik)) {
    f.loglik = -std::numeric_limits<double>::infinity();
    return f;
  }
  f.ok = true;
  if (want_gradient) {
    // beta sits at its optimum, so only the explicit kernel dependence counts:
    // dL = 1/2 tr((alpha alpha' - K^{-1}) dK).
    const Eigen::MatrixXd w = f.alpha * f.alpha.transpose() - llt.solve(Eigen::MatrixXd::Identity(n, n));
    Eigen::MatrixXd d_sf = 2.0 * sf2 * k;
    d_sf.diagonal().array() += 2.0 * sf2 * jitter;
    Eigen::MatrixXd d_ell(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        const double d = (x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)]) / ell;
        d_ell(i, j) = sf2 * k(i, j) * d * d;
      }
    const double d_sn = 2.0 * sn2 * (1.0 + jitter);
    f.gradient[0] = 0.5 * (w.cwiseProduct(d_sf)).sum();
    f.gradient[1] = 0.5 * (w.cwiseProduct(d_ell)).sum();
    f.gradient[2] = 0.5 * d_sn * w.trace();
  }
  return f;
}

double target_scale(const std::vector<double>& y) {
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double var = 0.0;
  for (double v : y) var += (v - mean) * (v - mean);
  var /= static_cast<double>(y.size());
  return var > 0.0 ? std::sqrt(var) : 1.0;
}

}  // namespace

double gpr_log_likelihood(const std::vector<double>& points, const std::vector<double>& targets,
                          const GprHyper& hyper, Eigen::Vector3d* gradient, double jitter) {
  check_inputs(points, targets);
  const Fit f = evaluate(points, targets, hyper, jitter, gradient != nullptr);
  if (gradient) *gradient = f.ok ? f.gradient : Eigen::Vector3d::Constant(std::numeric_limits<double>::quiet_NaN());
  return f.loglik;
}

GprModel gpr_make(const std::vector<double>& points, const std::vector<double>& targets,
                  const GprHyper& hyper, double jitter) {
  check_inputs(points, targets);
  const Fit f = evaluate(points, targets, hyper, jitter, false);
  if (!f.ok) fail(ErrorCode::kNumeric, "GPR kernel matrix is not positive definite after jitter");
  GprModel m;
  m.x_ = points;
  m.y_ = targets;
  m.hyper_ = hyper;
  m.sf2_ = std::exp(2.0 * hyper.log_signal_sd);
  m.ell_ = std::exp(hyper.log_length);
  m.sn2_ = std::exp(2.0 * hyper.log_noise_sd);
  m.jitter_ = jitter;
  m.loglik_ = f.loglik;
  m.beta_ = f.beta;
  m.chol_ = f.chol;
  m.alpha_ = f.alpha;
  return m;
}

GprModel gpr_fit(const std::vector<double>& points, const std::vector<double>& targets,
                 const GprOptions& options) {
  check_inputs(points, targets);
  if (options.restarts == 0) fail(ErrorCode::kDomain, "need at least one restart");
  if (!(options.log_lower < options.log_upper)) fail(ErrorCode::kDomain, "empty hyperparameter box");
  const double scale = std::log(target_scale(targets));
  const auto [lo_it, hi_it] = std::minmax_element(points.begin(), points.end());
  const double range = *hi_it - *lo_it;

  // Search coordinates: sigma_f and sigma_n relative to the target scale.
  auto to_hyper = [&](const std::vector<double>& u) { return GprHyper{u[0] + scale, u[1], u[2] + scale}; };
  auto objective = [&](const std::vector<double>& u) {
    return -evaluate(points, targets, to_hyper(u), options.jitter, false).loglik;
  };
  NelderMeadOptions nm;
  nm.lower.assign(3, options.log_lower);
  nm.upper.assign(3, options.log_upper);

  const std::vector<double> center{0.0, std::log(0.5 * range), std::log(0.1)};
  NelderMeadResult best;
  best.value = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < options.restarts; ++r) {
    std::vector<double> start = center;
    if (r > 0) {
      Rng rng = make_rng(options.seed, {stream::kFit, r});
      std::uniform_real_distribution<double> u(-2.0, 2.0);
      for (double& s : start) s += u(rng);
    }
    const NelderMeadResult res = nelder_mead(objective, start, nm);
    if (res.value < best.value) best = res;
  }
  if (!std::isfinite(best.value)) fail(ErrorCode::kNumeric, "GPR likelihood is not finite at any restart");
  return gpr_make(points, targets, to_hyper(best.x), options.jitter);
}

GprPosterior gpr_posterior(const GprModel& model, const std::vector<double>& query) {
  if (model.x_.empty()) fail(ErrorCode::kDomain, "GPR model is not fitted");
  for (double q : query)
    if (!std::isfinite(q)) fail(ErrorCode::kDomain, "non-finite query point");
  const Eigen::MatrixXd kq = model.sf2_ * se_kernel(query, model.x_, model.ell_);
  const Eigen::MatrixXd kqq = model.sf2_ * se_kernel(query, query, model.ell_);
  GprPosterior p;
  p.mean = design(query) * model.beta_ + kq * model.alpha_;
  const Eigen::MatrixXd v = model.chol_.triangularView<Eigen::Lower>().solve(kq.transpose());
  p.covariance = kqq - v.transpose() * v;
  p.covariance = 0.5 * (p.covariance + p.covariance.transpose());
  if (!p.mean.allFinite() || !p.covariance.allFinite()) fail(ErrorCode::kNumeric, "non-finite GPR posterior");
  return p;
}

beliefs::CorrelatedGaussianBelief gpr_belief(const GprModel& model, const std::vector<double>& grid) {
  GprPosterior p = gpr_posterior(model, grid);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p.covariance);
  if (es.eigenvalues().minCoeff() < 0.0) {
    const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    p.covariance = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
    p.covariance = 0.5 * (p.covariance + p.covariance.transpose());
  }
  return {p.mean, p.covariance,
          Eigen::VectorXd::Constant(static_cast<Eigen::Index>(grid.size()), model.noise_variance())};
}

GradientCheckReport gpr_loglik_gradient_check(const std::vector<double>& points,
                                              const std::vector<double>& targets,
                                              const GprHyper& hyper, double step, double tolerance) {
  GradientCheckReport rep;
  gpr_log_likelihood(points, targets, hyper, &rep.analytic);
  const Eigen::Vector3d h0 = hyper.as_vector();
  for (int i = 0; i < 3; ++i) {
    Eigen::Vector3d up = h0, down = h0;
    up[i] += step;
    down[i] -= step;
    rep.numeric[i] = (gpr_log_likelihood(points, targets, GprHyper::from_vector(up)) -
                      gpr_log_likelihood(points, targets, GprHyper::from_vector(down))) /
                     (2.0 * step);
    const double denom = std::max({std::abs(rep.analytic[i]), std::abs(rep.numeric[i]), 1e-2});
    rep.max_relative_error = std::max(rep.max_relative_error, std::abs(rep.analytic[i] - rep.numeric[i]) / denom);
  }
  rep.passed = rep.analytic.allFinite() && rep.numeric.allFinite() && rep.max_relative_error < tolerance;
  return rep;
}

GradientCheckReport gpr_loglik_gradient_check(const GprModel& model, double step, double tolerance) {
  return gpr_loglik_gradient_check(model.points(), model.targets(), model.hyper(), step, tolerance);
}

}  // namespace mocu::gpr
