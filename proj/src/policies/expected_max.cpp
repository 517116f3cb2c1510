#include "policies/expected_max.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "core/error.hpp"

namespace mocu::policies {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_pencil(std::span<const double> a, std::span<const double> b) {
  if (a.empty()) fail(ErrorCode::kDomain, "empty pencil");
  if (a.size() != b.size()) fail(ErrorCode::kDomain, "pencil intercept/slope length mismatch");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!std::isfinite(a[i]) || !std::isfinite(b[i])) fail(ErrorCode::kDomain, "non-finite pencil");
}

template <class Dist>
double envelope_expectation(std::span<const double> a, std::span<const double> b,
                            const PencilEnvelope& env, const Dist& dist) {
  double total = 0.0;
  double f_lo = 0.0, g_lo = 0.0;
  for (std::size_t k = 0; k < env.lines.size(); ++k) {
    const double hi = k + 1 < env.lines.size() ? env.breakpoints[k] : kInf;
    const double f_hi = hi == kInf ? 1.0 : dist.cdf(hi);
    const double g_hi = hi == kInf ? 0.0 : dist.partial_mean(hi);
    const std::size_t j = env.lines[k];
    total += a[j] * (f_hi - f_lo) + b[j] * (g_hi - g_lo);
    f_lo = f_hi;
    g_lo = g_hi;
  }
  return total;
}

}  // namespace

PencilEnvelope upper_envelope(std::span<const double> a, std::span<const double> b,
                              double tolerance) {
  check_pencil(a, b);
  std::vector<std::size_t> order(a.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    if (b[i] != b[j]) return b[i] < b[j];
    return a[i] > a[j];
  });
  // Collapse near-parallel groups to their highest line (lowest index on ties).
  std::vector<std::size_t> lines;
  for (std::size_t idx : order) {
    if (!lines.empty() && std::abs(b[idx] - b[lines.back()]) <= tolerance) {
      const std::size_t cur = lines.back();
      if (a[idx] > a[cur] || (a[idx] == a[cur] && idx < cur)) lines.back() = idx;
      continue;
    }
    lines.push_back(idx);
  }
  PencilEnvelope env;
  for (std::size_t idx : lines) {
    while (!env.lines.empty()) {
      const std::size_t top = env.lines.back();
      const double c = (a[top] - a[idx]) / (b[idx] - b[top]);
      if (!env.breakpoints.empty() && c <= env.breakpoints.back()) {
        env.lines.pop_back();
        env.breakpoints.pop_back();
        continue;
      }
      env.breakpoints.push_back(c);
      break;
    }
    env.lines.push_back(idx);
  }
  return env;
}

double StandardNormal::cdf(double c) const { return 0.5 * std::erfc(-c / std::numbers::sqrt2); }

double StandardNormal::partial_mean(double c) const {
  return -std::exp(-0.5 * c * c) / std::sqrt(2.0 * std::numbers::pi);
}

double StandardStudentT::cdf(double c) const {
  return boost::math::cdf(boost::math::students_t_distribution<double>(dof), c);
}

double StandardStudentT::partial_mean(double c) const {
  const double f = boost::math::pdf(boost::math::students_t_distribution<double>(dof), c);
  return -(dof + c * c) / (dof - 1.0) * f;
}

double expected_max_affine_excess(std::span<const double> a, std::span<const double> b) {
  check_pencil(a, b);
  const double top = *std::max_element(a.begin(), a.end());
  std::vector<double> shifted(a.begin(), a.end());
  for (double& x : shifted) x -= top;
  const PencilEnvelope env = upper_envelope(shifted, b);
  const double e = envelope_expectation(std::span<const double>(shifted), b, env, StandardNormal{});
  return std::max(e, 0.0);
}

double expected_max_affine(std::span<const double> a, std::span<const double> b) {
  check_pencil(a, b);
  return *std::max_element(a.begin(), a.end()) + expected_max_affine_excess(a, b);
}

double expected_max_affine_t_excess(std::span<const double> a, std::span<const double> b, double dof) {
  check_pencil(a, b);
  if (!(dof > 0.0)) fail(ErrorCode::kDomain, "Student-t dof must be positive");
  const double top = *std::max_element(a.begin(), a.end());
  std::vector<double> shifted(a.begin(), a.end());
  for (double& x : shifted) x -= top;
  const PencilEnvelope env = upper_envelope(shifted, b);
  if (env.lines.size() == 1) return shifted[env.lines.front()];
  if (dof <= 1.0) return kInf;
  const double e =
      envelope_expectation(std::span<const double>(shifted), b, env, StandardStudentT{dof});
  return std::max(e, 0.0);
}

double expected_max_affine_t(std::span<const double> a, std::span<const double> b, double dof) {
  const double top = a.empty() ? 0.0 : *std::max_element(a.begin(), a.end());
  return top + expected_max_affine_t_excess(a, b, dof);
}

}  // namespace mocu::policies
