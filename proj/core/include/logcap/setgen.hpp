#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include "logcap/types.hpp"

namespace logcap {

// l_k = e^{-lambda k^alpha}, consumed in the log domain.
struct LengthSchedule {
  double lambda;
  double alpha;
  LengthSchedule(double lambda_, double alpha_);
  double loglen(long k) const;  // k >= 1
};

// Tabulated density on [0,1]: strictly increasing grid covering [0,1],
// piecewise-linear interpolation. Normalized to unit mass on construction;
// negative entries are rejected, zero regions are allowed but flagged.
class DensityTable {
 public:
  static DensityTable uniform();
  static DensityTable from_points(std::vector<double> grid,
                                  std::vector<double> values);
  // Two-column text file: grid point, density value.
  static DensityTable from_file(const std::string& path);

  double at(double x) const;
  double sup() const { return sup_; }
  bool has_zero_region() const { return zero_region_; }
  bool renormalized() const { return renormalized_; }

  double cdf(double x) const;
  double quantile(double u) const;  // u in (0,1)

  double mean() const;  // \int x phi
  double integral_against(const std::function<double(double)>& f) const;
  // phi-mass of [lo,hi]
  double mass_between(double lo, double hi) const;

  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }

 private:
  DensityTable() = default;
  std::vector<double> grid_, values_, cum_;
  double sup_ = 0.0;
  bool zero_region_ = false;
  bool renormalized_ = false;
};

// c_1, c_2, ... in (0,1). The iid kind draws by inverse CDF from a density
// table; extension continues the stream, so prefixes never change with the
// batch size. Coincident values (possible in floating point) are nudged by
// one ulp and counted.
class CenterSequence {
 public:
  static CenterSequence iid(DensityTable phi, std::uint64_t seed);
  static CenterSequence uniform_grid();  // flattened (2j+1)/(2n) blocks
  static CenterSequence explicit_list(std::vector<double> centers);

  double at(long k);  // 1-based
  void ensure(long count);
  long available() const;
  bool extendable() const;
  std::uint64_t seed() const { return seed_; }
  long perturbed_count() const { return perturbed_; }

 private:
  enum class Kind { iid, grid, explicit_list };
  Kind kind_ = Kind::iid;
  DensityTable phi_;
  std::uint64_t seed_ = 0;
  std::mt19937_64 engine_;
  long grid_n_ = 1, grid_j_ = 0;
  std::vector<double> cache_;
  std::unordered_set<std::uint64_t> seen_;
  long perturbed_ = 0;
  double next_value();
  double dedup(double c);
};

// Dyadic index blocks {n, ..., 2n-1} and their unions.
struct IndexBlock {
  long lo, hi;  // inclusive
};
IndexBlock block(long n);
long block_size(long n);
// {n, 2n, ..., 2^q n}; the union of their blocks covers {n .. 2^{q+1}n - 1}.
std::vector<long> block_levels(long n, int q);
long block_union_size(long n, int q);  // (2^{q+1} - 1) n
// Levels m 2^s for s = 0..q-1, the multi-level averaging set.
std::vector<long> multilevel_levels(long m, int q);
// max(1, floor(log2(ln n))); requires n >= 2.
int default_q(long n);

struct LevelUnionInfo {
  bool disjoint = true;
  long overlap_i = -1, overlap_j = -1;
  int clipped = 0;
  double max_log_ratio = -1e300;  // log of max (l_i+l_j)/(2|c_i-c_j|)
};
std::vector<Interval> level_union(const LengthSchedule& schedule,
                                  CenterSequence& centers, long n,
                                  LevelUnionInfo* info = nullptr);

std::vector<double> uniform_grid_centers(long n);

// Keep the intervals of `v` wholly contained in some interval of `support`;
// partially overlapping intervals are discarded and counted.
std::vector<Interval> restrict_support(const std::vector<Interval>& support,
                                       const std::vector<Interval>& v,
                                       std::size_t* straddlers = nullptr);

// Finite-stage approximation state of the limit set: nested supports plus
// the stages that produced them.
struct GDeltaApprox {
  LengthSchedule schedule;
  std::shared_ptr<CenterSequence> centers;
  std::vector<long> stages;
  std::vector<Interval> support;
  std::size_t straddlers_discarded = 0;

  GDeltaApprox(LengthSchedule s, std::shared_ptr<CenterSequence> c);
  void apply_stage(const std::vector<Interval>& stage_intervals, long n);
};

}  // namespace logcap
