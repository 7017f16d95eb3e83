#pragma once

#include <cstddef>
#include <vector>

#include "logcap/errors.hpp"

namespace logcap {

// A subinterval of [0,1] stored as (center, natural-log length), so that
// lengths like e^{-100000} are representable long after e^{loglen} underflows.
// Endpoint materialization clips to [0,1]; the clip is reported, not silent.
class Interval {
 public:
  Interval(double center, double loglen);

  double center() const { return center_; }
  double loglen() const { return loglen_; }
  double length() const;  // e^{loglen}; may underflow to 0

  struct Endpoints {
    double lo, hi;
    bool clipped;
  };
  Endpoints endpoints() const;

  bool same_as(const Interval& o) const {
    return center_ == o.center_ && loglen_ == o.loglen_;
  }

  static Interval from_endpoints(double lo, double hi);

 private:
  double center_;
  double loglen_;
};

// Density over the unit reference interval: either a constant or sampled
// ordinates interpreted as the piecewise-linear interpolant on a uniform
// grid. An atom's density is this, affinely rescaled onto its interval.
class DensitySpec {
 public:
  static DensitySpec constant(double value);
  static DensitySpec sampled(std::vector<double> ordinates);

  bool is_constant() const { return constant_; }
  double constant_value() const { return value_; }
  const std::vector<double>& ordinates() const { return ordinates_; }

  double at(double s) const;  // s in [0,1]
  double mean() const;        // \int_0^1 density
  double mean_square() const;

 private:
  DensitySpec() = default;
  bool constant_ = true;
  double value_ = 1.0;
  double mean_ = 1.0;
  double mean_square_ = 1.0;
  std::vector<double> ordinates_;
};

// One weighted component: weight * density(s(x)) dx|_I / |I|.
// Mass of the atom is weight * mean(density).
struct Atom {
  Interval interval;
  DensitySpec density;
  double weight;
};

struct EnergyBreakdown {
  double self_sum = 0.0;
  double outer_sum = 0.0;
  double normalization = 0.0;
  double total = 0.0;
};

class PiecewiseMeasure {
 public:
  PiecewiseMeasure() = default;

  void add(const Interval& iv, const DensitySpec& d, double weight);

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }

  double total_mass() const;
  bool is_probability(double tol = 1e-9) const;

  void mark_disjoint(bool v) { disjoint_ = v; }
  bool disjoint_flag() const { return disjoint_; }

  void scale_weights(double c);
  PiecewiseMeasure normalized() const;

 private:
  std::vector<Atom> atoms_;
  bool disjoint_ = false;
};

// Refine constant-density atoms at all other atoms' endpoints so the result
// has pairwise disjoint-or-identical intervals. Sampled densities are
// re-sampled on the pieces (exact for the piecewise-linear interpretation up
// to node placement).
PiecewiseMeasure split_to_disjoint(const PiecewiseMeasure& mu);

}  // namespace logcap
