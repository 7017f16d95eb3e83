#pragma once

#include <vector>

#include "logcap/types.hpp"

namespace logcap {

// Panels are kept in coordinates relative to their owner interval so that
// small owners keep full precision; absolute geometry is derived on demand.
struct Panel {
  int owner;
  double rel_lo, rel_hi;  // in [-1/2, 1/2] of the owner
};

struct Discretization {
  std::vector<Interval> intervals;  // owners, zero-length ones dropped
  std::vector<Panel> panels;
  int dropped_zero_length = 0;
  std::size_t size() const { return panels.size(); }
  double abs_lo(std::size_t i) const;
  double abs_hi(std::size_t i) const;
  double abs_mid(std::size_t i) const;
  double abs_width(std::size_t i) const;
};

// Panels proportional to interval length (minimum one per interval), graded
// toward the endpoints (cosine grading; uniform for very small counts since
// the equilibrium density blows up like an inverse square root there).
Discretization discretize(const std::vector<Interval>& set, int panel_budget);

struct CapacityEstimate {
  double energy = 0.0;
  double capacity = 0.0;  // e^{-energy}
  int panel_count = 0;
  double error_estimate = 0.0;  // 0 for single solves; set by refine_estimate
  std::vector<double> weights;  // per-panel masses, sum to 1
  std::vector<double> midpoints, widths;
  bool projected = false;       // nonnegativity active set engaged
  bool monotone = true;         // refinement diagnostics
  double potential_flatness = 0.0;  // max_i |(Kw)_i - gamma| over free panels
};

// Minimizes the discrete energy over probability weights via the bordered
// stationarity system K w = gamma 1, sum w = 1; negative weights beyond
// -1e-8 trigger an active-set re-solve.
CapacityEstimate solve_equilibrium(const Discretization& d);

// Solves at each budget and Richardson-extrapolates the energy; the error
// estimate comes from successive differences.
CapacityEstimate refine_estimate(const std::vector<Interval>& set,
                                 const std::vector<int>& budgets);

struct DensityProfilePoint {
  double x, density;
};
std::vector<DensityProfilePoint> equilibrium_density_profile(
    const CapacityEstimate& estimate);

}  // namespace logcap
