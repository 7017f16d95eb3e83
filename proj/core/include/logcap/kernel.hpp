#pragma once

#include "logcap/types.hpp"

namespace logcap {

// Energy of the uniform probability measure on the unit interval,
// \iint -log|x-y| dx dy over the unit square. The test suite recomputes this
// with an independent adaptive quadrature oracle and pins the constant.
inline constexpr double kUnitIntervalSelfEnergy = 1.5;

// Self energy of the uniform probability measure on `a`, computed in the log
// domain: -loglen + kUnitIntervalSelfEnergy. Exact even when e^{loglen}
// underflows.
double self_energy_uniform(const Interval& a);

// Interaction of mu_a = da dx|_a/|a| and mu_b = db dx|_b/|b| for constant
// densities. Intervals must be disjoint or identical; partial overlap throws.
double pair_interaction_closed_form(const Interval& a, double da,
                                    const Interval& b, double db);

struct FarFieldResult {
  double value;  // (-log|c_a - c_b|) * fa * fb
  double bound;  // certified |exact - value| bound
};

// Point-mass approximation with a certified error bound. Requires distinct
// centers and (l_a + l_b) / (2 |c_a - c_b|) < 1.
FarFieldResult farfield_interaction(const Interval& a, double fa,
                                    const Interval& b, double fb,
                                    double sup_norm = 0.0);

// Adaptive evaluation of the pair interaction for general piecewise-linear
// densities: the inner integral is exact per density segment (the log kernel
// against a linear factor has a closed antiderivative, also across the
// diagonal singularity in the self case); the outer integral is adaptive
// Gauss-Kronrod to absolute tolerance `tol`. Throws BudgetExceededError with
// the best estimate when `max_segments` is hit.
double interaction_quadrature(const Interval& a, const DensitySpec& da,
                              const Interval& b, const DensitySpec& db,
                              double tol, int max_segments = 4000);

// Energy of a piecewise measure: per-atom self energies plus all distinct
// pair interactions. Atoms must be pairwise disjoint or identical. Constant
// density pairs use the closed form, or the far-field value when its bound
// is below the per-pair tolerance share; sampled densities go through
// quadrature. Summation follows a fixed chunk order, so results are
// identical for any thread count.
EnergyBreakdown measure_energy(const PiecewiseMeasure& mu, double tol = 1e-9);

// Cross energy of two measures; arguments are ordered canonically first, so
// swapping them returns the identical bits.
double mutual_energy(const PiecewiseMeasure& mu, const PiecewiseMeasure& nu,
                     double tol = 1e-9);

// Worker count for the pair loops (default 1). Reductions are chunk-ordered;
// any setting produces identical results.
void set_thread_count(int k);
int thread_count();

}  // namespace logcap
