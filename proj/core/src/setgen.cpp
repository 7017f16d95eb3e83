#include "logcap/setgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "logcap/rng.hpp"

namespace logcap {

namespace {
std::uint64_t bits_of(double x) {
  std::uint64_t u;
  std::memcpy(&u, &x, sizeof(u));
  return u;
}
}  // namespace

LengthSchedule::LengthSchedule(double lambda_, double alpha_)
    : lambda(lambda_), alpha(alpha_) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("lambda must be > 0");
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("alpha must be > 0");
}

double LengthSchedule::loglen(long k) const {
  if (k < 1) throw std::invalid_argument("schedule index k must be >= 1");
  return -lambda * std::pow(static_cast<double>(k), alpha);
}

DensityTable DensityTable::uniform() {
  return from_points({0.0, 1.0}, {1.0, 1.0});
}

DensityTable DensityTable::from_points(std::vector<double> grid,
                                       std::vector<double> values) {
  if (grid.size() != values.size() || grid.size() < 2)
    throw std::invalid_argument("density table needs >= 2 matching columns");
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    if (!(grid[i] < grid[i + 1]))
      throw std::invalid_argument("density grid must be strictly increasing");
  if (std::abs(grid.front()) > 1e-12 || std::abs(grid.back() - 1.0) > 1e-12)
    throw std::invalid_argument("density grid must cover [0,1]");
  grid.front() = 0.0;
  grid.back() = 1.0;
  for (double v : values)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("density values must be finite and >= 0");

  DensityTable t;
  t.grid_ = std::move(grid);
  t.values_ = std::move(values);
  double mass = 0.0;
  for (std::size_t i = 0; i + 1 < t.grid_.size(); ++i)
    mass += 0.5 * (t.values_[i] + t.values_[i + 1]) *
            (t.grid_[i + 1] - t.grid_[i]);
  if (!(mass > 0.0)) throw std::invalid_argument("density has zero mass");
  t.renormalized_ = std::abs(mass - 1.0) > 1e-6;
  for (double& v : t.values_) v /= mass;

  t.cum_.assign(t.grid_.size(), 0.0);
  for (std::size_t i = 0; i + 1 < t.grid_.size(); ++i) {
    t.cum_[i + 1] = t.cum_[i] + 0.5 * (t.values_[i] + t.values_[i + 1]) *
                                    (t.grid_[i + 1] - t.grid_[i]);
    if (t.values_[i] == 0.0 && t.values_[i + 1] == 0.0) t.zero_region_ = true;
  }
  t.cum_.back() = 1.0;
  t.sup_ = *std::max_element(t.values_.begin(), t.values_.end());
  return t;
}

DensityTable DensityTable::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open density table: " + path);
  std::vector<double> g, v;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double x, y;
    if (ls >> x >> y) {
      g.push_back(x);
      v.push_back(y);
    }
  }
  return from_points(std::move(g), std::move(v));
}

double DensityTable::at(double x) const {
  if (x <= 0.0) return values_.front();
  if (x >= 1.0) return values_.back();
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - grid_.begin()) - 1;
  const double h = grid_[i + 1] - grid_[i];
  const double f = (x - grid_[i]) / h;
  return values_[i] * (1.0 - f) + values_[i + 1] * f;
}

double DensityTable::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - grid_.begin()) - 1;
  const double h = grid_[i + 1] - grid_[i];
  const double t = (x - grid_[i]) / h;
  const double slope = values_[i + 1] - values_[i];
  return cum_[i] + h * (values_[i] * t + 0.5 * slope * t * t);
}

double DensityTable::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0))
    throw std::invalid_argument("quantile argument must be in (0,1)");
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
  std::size_t i = static_cast<std::size_t>(it - cum_.begin());
  i = (i == 0) ? 0 : i - 1;
  if (i + 1 >= grid_.size()) i = grid_.size() - 2;
  const double h = grid_[i + 1] - grid_[i];
  const double target = (u - cum_[i]) / h;  // mass per unit length
  const double p0 = values_[i], p1 = values_[i + 1];
  const double slope = p1 - p0;
  double t;
  if (std::abs(slope) < 1e-14 * std::max(p0, p1)) {
    t = p0 > 0.0 ? target / p0 : 0.0;
  } else {
    const double disc = p0 * p0 + 2.0 * slope * target;
    t = (std::sqrt(std::max(disc, 0.0)) - p0) / slope;
  }
  t = std::clamp(t, 0.0, 1.0);
  return grid_[i] + t * h;
}

double DensityTable::mean() const {
  return integral_against([](double x) { return x; });
}

double DensityTable::integral_against(
    const std::function<double(double)>& f) const {
  // 5-point Gauss-Legendre per table cell.
  static const double xs[5] = {-0.906179845938664, -0.538469310105683, 0.0,
                               0.538469310105683, 0.906179845938664};
  static const double ws[5] = {0.236926885056189, 0.478628670499366,
                               0.568888888888889, 0.478628670499366,
                               0.236926885056189};
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < grid_.size(); ++i) {
    const double a = grid_[i], b = grid_[i + 1];
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double cell = 0.0;
    for (int k = 0; k < 5; ++k) {
      const double x = c + h * xs[k];
      cell += ws[k] * f(x) * at(x);
    }
    s += cell * h;
  }
  return s;
}

double DensityTable::mass_between(double lo, double hi) const {
  if (hi <= lo) return 0.0;
  return cdf(hi) - cdf(lo);
}

CenterSequence CenterSequence::iid(DensityTable phi, std::uint64_t seed) {
  CenterSequence s;
  s.kind_ = Kind::iid;
  s.phi_ = std::move(phi);
  s.seed_ = seed;
  s.engine_.seed(seed);
  return s;
}

CenterSequence CenterSequence::uniform_grid() {
  CenterSequence s;
  s.kind_ = Kind::grid;
  return s;
}

CenterSequence CenterSequence::explicit_list(std::vector<double> centers) {
  for (double c : centers)
    if (!(c > 0.0 && c < 1.0))
      throw std::invalid_argument("explicit centers must lie in (0,1)");
  CenterSequence s;
  s.kind_ = Kind::explicit_list;
  s.cache_ = std::move(centers);
  for (double c : s.cache_) s.seen_.insert(bits_of(c));
  return s;
}

double CenterSequence::dedup(double c) {
  for (int tries = 0; tries < 100; ++tries) {
    if (!seen_.count(bits_of(c))) break;
    ++perturbed_;
    c = (c == 0.5) ? std::nextafter(c, 1.0) : std::nextafter(c, 0.5);
  }
  seen_.insert(bits_of(c));
  return c;
}

double CenterSequence::next_value() {
  switch (kind_) {
    case Kind::iid: {
      const double u = u01(engine_);
      double c = phi_.quantile(u);
      c = std::clamp(c, 1e-12, 1.0 - 1e-12);
      return dedup(c);
    }
    case Kind::grid: {
      const double c =
          (2.0 * grid_j_ + 1.0) / (2.0 * static_cast<double>(grid_n_));
      if (++grid_j_ >= grid_n_) {
        ++grid_n_;
        grid_j_ = 0;
      }
      return dedup(c);
    }
    case Kind::explicit_list:
      throw InsufficientDataError("explicit center list exhausted");
  }
  throw std::logic_error("unreachable");
}

void CenterSequence::ensure(long count) {
  while (static_cast<long>(cache_.size()) < count)
    cache_.push_back(next_value());
}

double CenterSequence::at(long k) {
  if (k < 1) throw std::invalid_argument("center index is 1-based");
  ensure(k);
  return cache_[static_cast<std::size_t>(k - 1)];
}

long CenterSequence::available() const {
  return kind_ == Kind::explicit_list
             ? static_cast<long>(cache_.size())
             : std::numeric_limits<long>::max();
}

bool CenterSequence::extendable() const { return kind_ != Kind::explicit_list; }

IndexBlock block(long n) {
  if (n < 1) throw std::invalid_argument("block level must be >= 1");
  return {n, 2 * n - 1};
}

long block_size(long n) { return block(n).hi - block(n).lo + 1; }

std::vector<long> block_levels(long n, int q) {
  if (q < 0) throw std::invalid_argument("q must be >= 0");
  std::vector<long> out;
  for (int s = 0; s <= q; ++s) out.push_back(n << s);
  return out;
}

long block_union_size(long n, int q) { return ((2L << q) - 1) * n; }

std::vector<long> multilevel_levels(long m, int q) {
  if (q < 1) throw std::invalid_argument("q must be >= 1");
  std::vector<long> out;
  for (int s = 0; s < q; ++s) out.push_back(m << s);
  return out;
}

int default_q(long n) {
  if (n < 2) throw std::invalid_argument("default_q requires n >= 2");
  const double inner = std::log(static_cast<double>(n));
  const int q = static_cast<int>(std::floor(std::log2(inner)));
  return std::max(1, q);
}

std::vector<Interval> level_union(const LengthSchedule& schedule,
                                  CenterSequence& centers, long n,
                                  LevelUnionInfo* info) {
  const IndexBlock b = block(n);
  centers.ensure(b.hi);
  std::vector<Interval> out;
  out.reserve(static_cast<std::size_t>(n));
  LevelUnionInfo local;
  for (long k = b.lo; k <= b.hi; ++k) {
    Interval iv(centers.at(k), schedule.loglen(k));
    if (iv.endpoints().clipped) ++local.clipped;
    out.push_back(iv);
  }
  if (info) {
    // overlap scan on materialized geometry + worst log gap ratio
    std::vector<std::size_t> order(out.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      return out[x].center() < out[y].center();
    });
    double max_hi = -1.0;
    std::size_t max_idx = 0;
    for (std::size_t oi = 0; oi < order.size(); ++oi) {
      const std::size_t i = order[oi];
      const auto e = out[i].endpoints();
      if (oi > 0 && e.lo < max_hi && local.disjoint) {
        local.disjoint = false;
        local.overlap_i = b.lo + static_cast<long>(max_idx);
        local.overlap_j = b.lo + static_cast<long>(i);
      }
      if (oi > 0) {
        const std::size_t p = order[oi - 1];
        const double gap = out[i].center() - out[p].center();
        if (gap == 0.0) {
          local.disjoint = false;
          local.overlap_i = b.lo + static_cast<long>(p);
          local.overlap_j = b.lo + static_cast<long>(i);
          local.max_log_ratio = std::numeric_limits<double>::infinity();
        } else {
          double lr = std::max(out[i].loglen(), out[p].loglen()) +
                      std::log1p(std::exp(-std::abs(out[i].loglen() -
                                                    out[p].loglen()))) -
                      std::log(2.0 * gap);
          local.max_log_ratio = std::max(local.max_log_ratio, lr);
        }
      }
      if (e.hi > max_hi) {
        max_hi = e.hi;
        max_idx = i;
      }
    }
    *info = local;
  }
  return out;
}

std::vector<double> uniform_grid_centers(long n) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (long j = 0; j < n; ++j)
    out[static_cast<std::size_t>(j)] =
        (2.0 * j + 1.0) / (2.0 * static_cast<double>(n));
  return out;
}

std::vector<Interval> restrict_support(const std::vector<Interval>& support,
                                       const std::vector<Interval>& v,
                                       std::size_t* straddlers) {
  struct Seg {
    double lo, hi;
  };
  std::vector<Seg> sup;
  sup.reserve(support.size());
  for (const Interval& s : support) {
    const auto e = s.endpoints();
    sup.push_back({e.lo, e.hi});
  }
  std::sort(sup.begin(), sup.end(),
            [](const Seg& a, const Seg& b) { return a.lo < b.lo; });

  std::size_t straddle_count = 0;
  std::vector<Interval> out;
  for (const Interval& iv : v) {
    const auto e = iv.endpoints();
    bool contained = false, intersects = false;
    // candidate: last segment with lo <= e.lo, plus the one after
    std::size_t i = static_cast<std::size_t>(
        std::upper_bound(sup.begin(), sup.end(), e.lo,
                         [](double x, const Seg& s) { return x < s.lo; }) -
        sup.begin());
    for (std::size_t c = (i > 0 ? i - 1 : 0); c < std::min(i + 1, sup.size());
         ++c) {
      if (std::max(sup[c].lo, e.lo) < std::min(sup[c].hi, e.hi))
        intersects = true;
      if (sup[c].lo <= e.lo && e.hi <= sup[c].hi) contained = true;
    }
    if (contained)
      out.push_back(iv);
    else if (intersects)
      ++straddle_count;
  }
  if (straddlers) *straddlers = straddle_count;
  return out;
}

GDeltaApprox::GDeltaApprox(LengthSchedule s, std::shared_ptr<CenterSequence> c)
    : schedule(s), centers(std::move(c)) {
  support.push_back(Interval::from_endpoints(0.0, 1.0));
}

void GDeltaApprox::apply_stage(const std::vector<Interval>& stage_intervals,
                               long n) {
  std::size_t cnt = 0;
  support = restrict_support(support, stage_intervals, &cnt);
  straddlers_discarded += cnt;
  stages.push_back(n);
}

}  // namespace logcap
