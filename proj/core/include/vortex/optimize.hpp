#pragma once

#include <functional>
#include <vector>

namespace vortex {

struct SimplexResult {
  std::vector<double> x;
  double value = 0;
  int iterations = 0;
  bool converged = false;
};

// Nelder–Mead maximisation (GSL nmsimplex2). Non-finite objective values act as walls.
SimplexResult nelder_mead_maximize(const std::function<double(const std::vector<double>&)>& f,
                                   const std::vector<double>& x0, const std::vector<double>& step,
                                   double size_tol, double value_tol, int max_iter = 5000);

}  // namespace vortex
