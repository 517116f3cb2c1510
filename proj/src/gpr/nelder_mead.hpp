#pragma once

#include <functional>
#include <vector>

namespace mocu::gpr {

struct NelderMeadOptions {
  double initial_step = 1.0;
  std::size_t max_evaluations = 4000;
  double f_tolerance = 1e-10;
  double x_tolerance = 1e-8;
  // Box applied by projection before every evaluation; empty = unbounded.
  std::vector<double> lower, upper;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t evaluations = 0;
};

/// Minimizes f with the standard simplex moves (reflection 1, expansion 2,
/// contraction 1/2, shrink 1/2).
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> start, const NelderMeadOptions& options = {});

}  // namespace mocu::gpr
