#include "logcap/assumptions.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>

#include "logcap/rng.hpp"
#include "log_antiderivatives.hpp"

namespace logcap {

namespace {
using detail::Acc;
using detail::logaddexp;
using detail::seg_neglog_linear;
}  // namespace

std::vector<TestFunction> default_test_functions(const DensityTable& phi) {
  std::vector<TestFunction> fs;
  fs.push_back({"1", [](double) { return 1.0; },
                phi.integral_against([](double) { return 1.0; })});
  fs.push_back(
      {"x", [](double x) { return x; }, phi.integral_against([](double x) {
         return x;
       })});
  fs.push_back({"x^2", [](double x) { return x * x; },
                phi.integral_against([](double x) { return x * x; })});
  fs.push_back({"cos(pi x)",
                [](double x) { return std::cos(std::numbers::pi * x); },
                phi.integral_against([](double x) {
                  return std::cos(std::numbers::pi * x);
                })});
  return fs;
}

DistributionAudit check_distribution(CenterSequence& centers, long n_max,
                                     const std::vector<TestFunction>& fs,
                                     double band_scale) {
  if (n_max < 8) throw std::invalid_argument("n_max must be >= 8");
  if (!centers.extendable() && centers.available() < 2 * n_max - 1)
    throw InsufficientDataError(
        "center sequence shorter than 2*n_max - 1 entries");
  centers.ensure(2 * n_max - 1);

  DistributionAudit out;
  for (const auto& tf : fs) out.function_names.push_back(tf.name);
  std::vector<long> ns;
  for (long n = n_max; n >= 8; n /= 2) ns.push_back(n);
  std::reverse(ns.begin(), ns.end());
  out.ns = ns;

  for (long n : ns) {
    double worst = 0.0;
    for (const auto& tf : fs) {
      Acc acc;
      for (long k = n; k <= 2 * n - 1; ++k) acc.add(tf.f(centers.at(k)));
      const double avg = acc.value() / static_cast<double>(n);
      worst = std::max(worst, std::abs(avg - tf.target));
    }
    out.deviations.push_back(worst);
  }

  // least-squares slope of the deviation trace against the level index
  const std::size_t m = out.deviations.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sx += static_cast<double>(i);
    sy += out.deviations[i];
    sxx += static_cast<double>(i) * i;
    sxy += static_cast<double>(i) * out.deviations[i];
  }
  const double denom = m * sxx - sx * sx;
  out.trend_slope = denom > 0 ? (m * sxy - sx * sy) / denom : 0.0;
  out.trend_ok = out.trend_slope <= 1e-12;

  out.band = band_scale / std::sqrt(static_cast<double>(n_max));
  out.final_deviation = out.deviations.back();
  out.pass = out.final_deviation <= out.band && out.trend_ok;
  return out;
}

std::vector<double> default_delta_grid() {
  return {1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
}

LogSpacingAudit check_log_spacing(CenterSequence& centers, long n, int q,
                                  std::vector<double> delta_grid,
                                  double epsilon) {
  std::sort(delta_grid.begin(), delta_grid.end(), std::greater<double>());
  LogSpacingAudit out;
  out.delta_grid = delta_grid;
  out.levels = block_levels(n, q);
  out.epsilon = epsilon;
  const std::size_t L = out.levels.size();
  const double dmax = delta_grid.front();

  const long top = 2 * out.levels.back() - 1;
  centers.ensure(top);
  std::vector<double> c(static_cast<std::size_t>(top) + 1, 0.0);
  for (long k = 1; k <= top; ++k)
    c[static_cast<std::size_t>(k)] = centers.at(k);

  out.table.assign(delta_grid.size(), std::vector<double>(L * L, 0.0));

  // cells are independent; evaluate them concurrently
  std::vector<std::future<std::vector<double>>> futs;
  for (std::size_t s = 0; s < L; ++s) {
    for (std::size_t t = 0; t < L; ++t) {
      const long np = out.levels[s], npp = out.levels[t];
      futs.push_back(std::async(std::launch::async, [&, np, npp]() {
        std::vector<Acc> acc(delta_grid.size());
        for (long i = np; i <= 2 * np - 1; ++i) {
          const double ci = c[static_cast<std::size_t>(i)];
          for (long j = npp; j <= 2 * npp - 1; ++j) {
            if (i == j) continue;
            const double d = std::abs(ci - c[static_cast<std::size_t>(j)]);
            if (d >= dmax) continue;
            if (d == 0.0)
              throw SingularPairError(static_cast<std::size_t>(i),
                                      static_cast<std::size_t>(j));
            const double v = -std::log(d);
            for (std::size_t di = 0; di < delta_grid.size(); ++di)
              if (d < delta_grid[di]) acc[di].add(v);
          }
        }
        std::vector<double> res(delta_grid.size());
        const double norm = static_cast<double>(np) * static_cast<double>(npp);
        for (std::size_t di = 0; di < delta_grid.size(); ++di)
          res[di] = acc[di].value() / norm;
        return res;
      }));
    }
  }
  for (std::size_t cell = 0; cell < L * L; ++cell) {
    const std::vector<double> res = futs[cell].get();
    for (std::size_t di = 0; di < delta_grid.size(); ++di)
      out.table[di][cell] = res[di];
  }

  out.worst.assign(delta_grid.size(), 0.0);
  for (std::size_t di = 0; di < delta_grid.size(); ++di)
    out.worst[di] =
        *std::max_element(out.table[di].begin(), out.table[di].end());
  for (std::size_t di = 0; di < delta_grid.size(); ++di) {
    if (out.worst[di] < epsilon) {
      out.passing_delta = static_cast<int>(di);
      out.pass = true;
      break;
    }
  }
  return out;
}

GapAudit check_gap_control(const LengthSchedule& schedule,
                           CenterSequence& centers, long n, int q,
                           double epsilon) {
  GapAudit out;
  out.n = n;
  out.q = q;
  out.epsilon = epsilon;
  const auto levels = block_levels(n, q);
  const long lo = n, hi = 2 * levels.back() - 1;  // union covers lo..hi
  centers.ensure(hi);

  const std::size_t m = static_cast<std::size_t>(hi - lo + 1);
  std::vector<double> c(m), ll(m);
  for (long k = lo; k <= hi; ++k) {
    c[static_cast<std::size_t>(k - lo)] = centers.at(k);
    ll[static_cast<std::size_t>(k - lo)] = schedule.loglen(k);
  }

  const std::size_t n_chunks = std::min<std::size_t>(m, 64);
  struct Best {
    double lr = -std::numeric_limits<double>::infinity();
    long i = -1, j = -1;
  };
  std::vector<Best> bests(n_chunks);
  std::vector<std::future<void>> futs;
  for (std::size_t w = 0; w < n_chunks; ++w) {
    futs.push_back(std::async(std::launch::async, [&, w]() {
      Best b;
      for (std::size_t i = w; i < m; i += n_chunks) {
        for (std::size_t j = i + 1; j < m; ++j) {
          const double d = std::abs(c[i] - c[j]);
          if (d == 0.0) throw SingularPairError(lo + i, lo + j);
          const double lr = logaddexp(ll[i], ll[j]) - std::log(2.0 * d);
          if (lr > b.lr) {
            b.lr = lr;
            b.i = lo + static_cast<long>(i);
            b.j = lo + static_cast<long>(j);
          }
        }
      }
      bests[w] = b;
    }));
  }
  for (auto& f : futs) f.get();
  Best best;
  for (const Best& b : bests) {
    if (b.lr > best.lr || (b.lr == best.lr && b.i >= 0 &&
                           (best.i < 0 || b.i < best.i))) {
      best = b;
    }
  }
  out.max_log_ratio = best.lr;
  out.max_ratio = std::exp(best.lr);
  out.worst_i = best.i;
  out.worst_j = best.j;
  out.pass = out.max_log_ratio < std::log(epsilon);
  return out;
}

AuditReport run_audit(const LengthSchedule& schedule, CenterSequence& centers,
                      const DensityTable& phi, long n, int q,
                      const AuditThresholds& thresholds) {
  AuditReport r;
  r.n = n;
  r.q = q;
  r.seed = centers.seed();
  r.distribution = check_distribution(centers, n, default_test_functions(phi),
                                      thresholds.a1_band_scale);
  r.log_spacing = check_log_spacing(centers, n, q, thresholds.a2_deltas,
                                    thresholds.a2_epsilon);
  r.gap = check_gap_control(schedule, centers, n, q, thresholds.a3_epsilon);
  return r;
}

TailStats montecarlo_gap_tail(const LengthSchedule& schedule,
                              const DensityTable& phi, long n, double epsilon,
                              long trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  const int q = default_q(n);
  const auto levels = block_levels(n, q);
  const long lo = n, hi = 2 * levels.back() - 1;
  const std::size_t m = static_cast<std::size_t>(hi - lo + 1);

  std::vector<double> ll(m);
  for (long k = lo; k <= hi; ++k)
    ll[static_cast<std::size_t>(k - lo)] = schedule.loglen(k);
  const double log_eps = std::log(epsilon);

  TailStats out;
  out.trials = trials;
  const double K = phi.sup();
  const double log_bound = std::log(4.0) +
                           4.0 * std::log(static_cast<double>(n)) +
                           std::log(2.0 * K / epsilon) - schedule.lambda * n;
  out.bound_value = std::exp(log_bound);
  out.bound_vacuous = out.bound_value >= 1.0;

  for (long t = 0; t < trials; ++t) {
    CenterSequence seq =
        CenterSequence::iid(phi, derive_seed(seed, static_cast<std::uint64_t>(t)));
    seq.ensure(hi);
    std::vector<double> c(m);
    for (long k = lo; k <= hi; ++k)
      c[static_cast<std::size_t>(k - lo)] = seq.at(k);
    bool violated = false;
    for (std::size_t i = 0; i < m && !violated; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        const double d = std::abs(c[i] - c[j]);
        if (d == 0.0 ||
            logaddexp(ll[i], ll[j]) - std::log(2.0 * d) >= log_eps) {
          violated = true;
          break;
        }
      }
    }
    if (violated) ++out.violation_count;
  }
  return out;
}

CenteredKernel::CenteredKernel(const DensityTable& phi, double delta,
                               int grid_size)
    : phi_(phi), delta_(delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("delta must be in (0,1)");
  if (grid_size < 3) throw std::invalid_argument("grid too small");

  gv_.resize(static_cast<std::size_t>(grid_size));
  for (int i = 0; i < grid_size; ++i) {
    const double x = static_cast<double>(i) / (grid_size - 1);
    gv_[static_cast<std::size_t>(i)] = conditional_mean_exact(x);
  }

  // c = \int g(x) phi(x) dx with the exact g
  c_ = phi_.integral_against([&](double x) { return conditional_mean_exact(x); });

  // interpolation error at fixed probes
  double worst = 0.0;
  for (int p = 0; p < 64; ++p) {
    const double x = std::fmod(0.5 + 0.6180339887498949 * (p + 1), 1.0);
    worst = std::max(worst,
                     std::abs(conditional_mean(x) - conditional_mean_exact(x)));
  }
  probe_error_ = worst;
}

double CenteredKernel::conditional_mean_exact(double x) const {
  // \int_{(x-delta, x+delta) cap [0,1]} (-log|x-y|) phi(y) dy, exact per
  // table cell.
  const double lo = std::max(0.0, x - delta_);
  const double hi = std::min(1.0, x + delta_);
  if (hi <= lo) return 0.0;
  const auto& g = phi_.grid();
  const auto& v = phi_.values();
  Acc acc;
  for (std::size_t i = 0; i + 1 < g.size(); ++i) {
    const double p = std::max(g[i], lo);
    const double q = std::min(g[i + 1], hi);
    if (q <= p) continue;
    const double h = g[i + 1] - g[i];
    const double vp = v[i] + (v[i + 1] - v[i]) * (p - g[i]) / h;
    const double vq = v[i] + (v[i + 1] - v[i]) * (q - g[i]) / h;
    acc.add(seg_neglog_linear(x, p, q, vp, vq));
  }
  return acc.value();
}

double CenteredKernel::conditional_mean(double x) const {
  const std::size_t m = gv_.size() - 1;
  double t = std::clamp(x, 0.0, 1.0) * static_cast<double>(m);
  const std::size_t i = std::min(static_cast<std::size_t>(t), m - 1);
  const double frac = t - static_cast<double>(i);
  return gv_[i] * (1.0 - frac) + gv_[i + 1] * frac;
}

double CenteredKernel::G(double x, double y) const {
  const double d = std::abs(x - y);
  if (d <= 0.0 || d >= delta_) return 0.0;
  return -std::log(d);
}

double CenteredKernel::H(double x, double y) const {
  return G(x, y) - conditional_mean(x) - conditional_mean(y) + c_;
}

double FourthMomentStats::max_frequency() const {
  long worst = 0;
  for (const auto& row : exceed)
    for (long v : row) worst = std::max(worst, v);
  return trials > 0 ? static_cast<double>(worst) / trials : 0.0;
}

FourthMomentStats montecarlo_fourth_moment(const DensityTable& phi,
                                           double delta, long n, int q,
                                           long trials, std::uint64_t seed,
                                           double epsilon) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  CenteredKernel ker(phi, delta);

  FourthMomentStats out;
  out.trials = trials;
  out.delta = delta;
  out.epsilon = epsilon;
  out.levels = block_levels(n, q);
  const std::size_t L = out.levels.size();
  out.exceed.assign(L, std::vector<long>(L, 0));

  // marginal-mean probes: E_Y H(x0, Y) should vanish
  {
    std::mt19937_64 eng(derive_seed(seed, 0xabcdef));
    out.probe_points = {0.17, 0.5, 0.83};
    const long N = 200000;
    for (double x0 : out.probe_points) {
      Acc s, s2;
      for (long i = 0; i < N; ++i) {
        const double y = phi.quantile(u01(eng));
        const double h = ker.H(x0, y);
        s.add(h);
        s2.add(h * h);
      }
      const double mean = s.value() / N;
      const double var = std::max(0.0, s2.value() / N - mean * mean);
      out.probe_means.push_back(mean);
      out.probe_stderrs.push_back(std::sqrt(var / N));
    }
    out.probes_centered = true;
    for (std::size_t i = 0; i < out.probe_means.size(); ++i)
      if (std::abs(out.probe_means[i]) > 3.0 * out.probe_stderrs[i])
        out.probes_centered = false;
  }

  const long lo = n, hi = 2 * out.levels.back() - 1;
  const std::size_t m = static_cast<std::size_t>(hi - lo + 1);
  std::vector<double> c(m), g(m);
  for (long t = 0; t < trials; ++t) {
    CenterSequence seq = CenterSequence::iid(
        phi, derive_seed(seed, static_cast<std::uint64_t>(t) + 1));
    seq.ensure(hi);
    for (long k = lo; k <= hi; ++k) {
      c[static_cast<std::size_t>(k - lo)] = seq.at(k);
      g[static_cast<std::size_t>(k - lo)] =
          ker.conditional_mean(c[static_cast<std::size_t>(k - lo)]);
    }
    for (std::size_t s = 0; s < L; ++s) {
      for (std::size_t u = 0; u < L; ++u) {
        const long np = out.levels[s], npp = out.levels[u];
        Acc S;
        for (long i = np; i <= 2 * np - 1; ++i) {
          const std::size_t ii = static_cast<std::size_t>(i - lo);
          for (long j = npp; j <= 2 * npp - 1; ++j) {
            if (i == j) continue;
            const std::size_t jj = static_cast<std::size_t>(j - lo);
            const double d = std::abs(c[ii] - c[jj]);
            const double G = (d > 0.0 && d < delta) ? -std::log(d) : 0.0;
            S.add(G - g[ii] - g[jj] + ker.c());
          }
        }
        if (std::abs(S.value()) >
            epsilon * static_cast<double>(np) * static_cast<double>(npp))
          ++out.exceed[s][u];
      }
    }
  }

  const double scale =
      std::pow(epsilon, 4.0) * std::pow(static_cast<double>(n), 4.0);
  out.fitted_constant = out.max_frequency() * scale;
  return out;
}

}  // namespace logcap
