#pragma once

#include <functional>

namespace logcap {

struct AdaptiveResult {
  double value = 0.0;
  double error = 0.0;
  int segments = 0;
  bool converged = false;
};

// Adaptive Gauss-Kronrod (G7,K15) on [a,b] to absolute tolerance.
// Throws BudgetExceededError (carrying the running estimate) if the segment
// budget is hit before convergence.
AdaptiveResult adaptive_gk(const std::function<double(double)>& f, double a,
                           double b, double abs_tol, int max_segments = 4000);

// Same, but returns the best estimate instead of throwing on budget.
AdaptiveResult adaptive_gk_nothrow(const std::function<double(double)>& f,
                                   double a, double b, double abs_tol,
                                   int max_segments = 4000);

}  // namespace logcap
