#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "logcap/setgen.hpp"
#include "logcap/types.hpp"

namespace logcap {

struct TestFunction {
  std::string name;
  std::function<double(double)> f;
  double target;  // \int f phi
};
// {1, x, x^2, cos(pi x)} with targets integrated against the table.
std::vector<TestFunction> default_test_functions(const DensityTable& phi);

// Block averages of test functions against their phi-targets over a dyadic
// sweep of levels; the verdict needs the final deviation inside the band and
// a non-increasing trend.
struct DistributionAudit {
  std::vector<long> ns;
  std::vector<double> deviations;  // sup over the family, per level
  std::vector<std::string> function_names;
  double band = 0.0;  // band_scale / sqrt(n_max)
  double final_deviation = 0.0;
  double trend_slope = 0.0;
  bool trend_ok = false;
  bool pass = false;
};
DistributionAudit check_distribution(CenterSequence& centers, long n_max,
                                     const std::vector<TestFunction>& fs,
                                     double band_scale = 5.0);

// Truncated log-average spacing over every pair of dyadic blocks
// {n, 2n, ..., 2^q n}; passes if some delta in the grid holds the bound
// epsilon for all block pairs.
struct LogSpacingAudit {
  std::vector<double> delta_grid;
  std::vector<long> levels;
  std::vector<std::vector<double>> table;  // [delta][cell s*L+t]
  std::vector<double> worst;               // per delta
  double epsilon = 0.0;
  int passing_delta = -1;
  bool pass = false;
};
std::vector<double> default_delta_grid();
LogSpacingAudit check_log_spacing(CenterSequence& centers, long n, int q,
                                  std::vector<double> delta_grid,
                                  double epsilon);

// Max of (l_i + l_j) / (2 |c_i - c_j|) over the block union, in log domain.
struct GapAudit {
  double max_ratio = 0.0;
  double max_log_ratio = -1e300;
  long worst_i = -1, worst_j = -1;
  double epsilon = 0.0;
  bool pass = false;
  long n = 0;
  int q = 0;
};
GapAudit check_gap_control(const LengthSchedule& schedule,
                           CenterSequence& centers, long n, int q,
                           double epsilon);

struct AuditThresholds {
  double a1_band_scale = 5.0;
  std::vector<double> a2_deltas = default_delta_grid();
  double a2_epsilon = 0.05;
  double a3_epsilon = 0.5;
};

struct AuditReport {
  DistributionAudit distribution;
  LogSpacingAudit log_spacing;
  GapAudit gap;
  long n = 0;
  int q = 0;
  std::uint64_t seed = 0;
  bool pass() const {
    return distribution.pass && log_spacing.pass && gap.pass;
  }
};
AuditReport run_audit(const LengthSchedule& schedule, CenterSequence& centers,
                      const DensityTable& phi, long n, int q,
                      const AuditThresholds& thresholds = {});

// Frequency of a gap-control violation anywhere in the block union at level
// n, against the union bound 4 n^4 (2K/eps) e^{-lambda n}.
struct TailStats {
  long trials = 0;
  long violation_count = 0;
  double bound_value = 0.0;
  bool bound_vacuous = false;
  double frequency() const {
    return trials > 0 ? static_cast<double>(violation_count) / trials : 0.0;
  }
};
TailStats montecarlo_gap_tail(const LengthSchedule& schedule,
                              const DensityTable& phi, long n, double epsilon,
                              long trials, std::uint64_t seed);

// Centered truncated log kernel H(x,y) = G - g(x) - g(y) + c with
// G(x,y) = (-log|x-y|) 1_{|x-y|<delta}, g(x) = E[G(x,Y)], c = E G.
// Conditional means are exact for the piecewise-linear table and cached on a
// grid for the Monte-Carlo loops; the interpolation error is probed.
class CenteredKernel {
 public:
  CenteredKernel(const DensityTable& phi, double delta, int grid_size = 4097);
  double delta() const { return delta_; }
  double c() const { return c_; }
  double conditional_mean(double x) const;        // interpolated
  double conditional_mean_exact(double x) const;  // piecewise closed form
  double G(double x, double y) const;
  double H(double x, double y) const;
  double probe_error() const { return probe_error_; }

 private:
  DensityTable phi_;
  double delta_;
  double c_ = 0.0;
  std::vector<double> gv_;
  double probe_error_ = 0.0;
};

struct FourthMomentStats {
  long trials = 0;
  double delta = 0.0, epsilon = 0.0;
  std::vector<long> levels;
  std::vector<std::vector<long>> exceed;  // [s][t] counts
  std::vector<double> probe_points, probe_means, probe_stderrs;
  bool probes_centered = false;  // every |mean| <= 3 stderr
  double max_frequency() const;
  double fitted_constant = 0.0;  // C with max freq = C / (eps n)^4-style scale
};
FourthMomentStats montecarlo_fourth_moment(const DensityTable& phi,
                                           double delta, long n, int q,
                                           long trials, std::uint64_t seed,
                                           double epsilon);

}  // namespace logcap
