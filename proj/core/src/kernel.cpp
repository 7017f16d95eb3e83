#include "logcap/kernel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <future>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "logcap/quadrature.hpp"
#include "log_antiderivatives.hpp"

namespace logcap {

namespace {

using detail::Acc;
using detail::density_neglog_integral;
using detail::logaddexp;
using detail::rect_log_integral;
using detail::seg_neglog_linear;

std::atomic<int> g_threads{1};

// Relative length/gap threshold below which an interval is treated as a
// point mass against the other factor; the neglected term is O((l/gap)^2).
constexpr double kPointTier = 1e-8;

}  // namespace

double self_energy_uniform(const Interval& a) {
  return -a.loglen() + kUnitIntervalSelfEnergy;
}

double pair_interaction_closed_form(const Interval& a, double da,
                                    const Interval& b, double db) {
  if (a.same_as(b)) return (-a.loglen() + kUnitIntervalSelfEnergy) * da * db;
  const auto ea = a.endpoints();
  const auto eb = b.endpoints();
  if (std::max(ea.lo, eb.lo) < std::min(ea.hi, eb.hi))
    throw PartialOverlapError(0, 1);
  const double gap = std::abs(a.center() - b.center());
  if (gap == 0.0) throw SingularPairError(0, 1);
  const double la = ea.hi - ea.lo, lb = eb.hi - eb.lo;
  const bool a_point = la < kPointTier * gap;
  const bool b_point = lb < kPointTier * gap;
  if (a_point && b_point) return da * db * (-std::log(gap));
  if (b_point)
    return da * db * seg_neglog_linear(b.center(), ea.lo, ea.hi, 1.0, 1.0) / la;
  if (a_point)
    return da * db * seg_neglog_linear(a.center(), eb.lo, eb.hi, 1.0, 1.0) / lb;
  return -da * db * rect_log_integral(ea.lo, ea.hi, eb.lo, eb.hi) / (la * lb);
}

FarFieldResult farfield_interaction(const Interval& a, double fa,
                                    const Interval& b, double fb,
                                    double sup_norm) {
  const double gap = std::abs(a.center() - b.center());
  if (gap == 0.0) throw SingularPairError(0, 1);
  const double log_ratio =
      logaddexp(a.loglen(), b.loglen()) - std::log(2.0 * gap);
  if (log_ratio >= 0.0)
    throw Error("far-field condition violated: (l_a+l_b)/(2|c_a-c_b|) >= 1");
  const double ratio = std::exp(log_ratio);
  const double eps = -std::log1p(-ratio);
  const double neg_log = -std::log(gap);
  const double K = std::max({std::abs(fa), std::abs(fb), sup_norm});
  return {neg_log * fa * fb, (2.0 * K * std::max(neg_log, 0.0) + K * K) * eps};
}

double interaction_quadrature(const Interval& a, const DensitySpec& da,
                              const Interval& b, const DensitySpec& db,
                              double tol, int max_segments) {
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (da.mean() == 0.0 || db.mean() == 0.0) return 0.0;

  if (a.same_as(b)) {
    // Work on the reference square: the log split -loglen + reference part
    // keeps everything O(1) regardless of the interval scale.
    const double shift = -a.loglen() * da.mean() * db.mean();
    auto outer = [&](double u) {
      return da.at(u) * density_neglog_integral(u, 0.0, 1.0, db);
    };
    const auto r = adaptive_gk(outer, 0.0, 1.0, tol, max_segments);
    return shift + r.value;
  }

  const auto ea = a.endpoints();
  const auto eb = b.endpoints();
  if (std::max(ea.lo, eb.lo) < std::min(ea.hi, eb.hi))
    throw PartialOverlapError(0, 1);
  const double gap = std::abs(a.center() - b.center());
  if (gap == 0.0) throw SingularPairError(0, 1);
  const double la = ea.hi - ea.lo, lb = eb.hi - eb.lo;
  const bool a_point = la < kPointTier * gap;
  const bool b_point = lb < kPointTier * gap;
  if (a_point && b_point) return -std::log(gap) * da.mean() * db.mean();
  if (a_point) {
    return da.mean() *
           density_neglog_integral(a.center(), eb.lo, eb.hi, db) / lb;
  }
  auto inner_at = [&](double x) {
    if (b_point) return db.mean() * -std::log(std::abs(x - b.center()));
    return density_neglog_integral(x, eb.lo, eb.hi, db) / lb;
  };
  auto outer = [&](double u) {
    const double x = ea.lo + la * u;
    return da.at(u) * inner_at(x);
  };
  const auto r = adaptive_gk(outer, 0.0, 1.0, tol, max_segments);
  return r.value;
}

namespace {

// Interaction of two atoms' component measures (weights excluded).
double atom_interaction(const Atom& A, const Atom& B, double pair_tol) {
  const bool both_const = A.density.is_constant() && B.density.is_constant();
  if (A.interval.same_as(B.interval)) {
    if (both_const)
      return pair_interaction_closed_form(A.interval,
                                          A.density.constant_value(),
                                          B.interval,
                                          B.density.constant_value());
    return interaction_quadrature(A.interval, A.density, B.interval, B.density,
                                  pair_tol);
  }
  if (both_const) {
    const double fa = A.density.constant_value();
    const double fb = B.density.constant_value();
    const double gap = std::abs(A.interval.center() - B.interval.center());
    if (gap > 0.0) {
      const double log_ratio =
          logaddexp(A.interval.loglen(), B.interval.loglen()) -
          std::log(2.0 * gap);
      if (log_ratio < 0.0) {
        const FarFieldResult ff =
            farfield_interaction(A.interval, fa, B.interval, fb);
        if (ff.bound <= pair_tol) return ff.value;
      }
    }
    return pair_interaction_closed_form(A.interval, fa, B.interval, fb);
  }
  return interaction_quadrature(A.interval, A.density, B.interval, B.density,
                                pair_tol);
}

double atom_self_energy(const Atom& a, double pair_tol) {
  if (a.density.is_constant()) {
    const double v = a.density.constant_value();
    return v * v * self_energy_uniform(a.interval);
  }
  return interaction_quadrature(a.interval, a.density, a.interval, a.density,
                                pair_tol);
}

// Atoms must be pairwise disjoint or identical.
void check_disjoint_or_identical(const std::vector<Atom>& atoms) {
  struct Ent {
    double lo, hi;
    std::size_t idx;
  };
  std::vector<Ent> es;
  es.reserve(atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const auto e = atoms[i].interval.endpoints();
    es.push_back({e.lo, e.hi, i});
  }
  std::sort(es.begin(), es.end(), [](const Ent& x, const Ent& y) {
    if (x.lo != y.lo) return x.lo < y.lo;
    return x.hi < y.hi;
  });
  double max_hi = -1.0;
  std::size_t max_idx = 0;
  for (const Ent& e : es) {
    if (e.lo < max_hi &&
        !atoms[e.idx].interval.same_as(atoms[max_idx].interval))
      throw PartialOverlapError(max_idx, e.idx);
    if (e.hi > max_hi) {
      max_hi = e.hi;
      max_idx = e.idx;
    }
  }
}

// Deterministic chunked pair reduction: rows are grouped into a fixed number
// of chunks (independent of the worker count), each chunk is summed
// sequentially, and chunk results combine in chunk order.
template <typename PairTerm>
double reduce_pairs(std::size_t n_rows,
                    const std::function<std::size_t(std::size_t)>& row_len,
                    PairTerm term) {
  std::vector<std::size_t> row_of_chunk{0};
  {
    std::size_t total = 0;
    for (std::size_t i = 0; i < n_rows; ++i) total += row_len(i);
    const std::size_t n_chunks = 256;
    const std::size_t per = std::max<std::size_t>(1, total / n_chunks);
    std::size_t acc = 0;
    for (std::size_t i = 0; i < n_rows; ++i) {
      acc += row_len(i);
      if (acc >= per && i + 1 < n_rows) {
        row_of_chunk.push_back(i + 1);
        acc = 0;
      }
    }
    row_of_chunk.push_back(n_rows);
  }
  const std::size_t n_chunks = row_of_chunk.size() - 1;
  std::vector<double> partial(n_chunks, 0.0);
  std::exception_ptr first_error = nullptr;
  std::mutex err_mu;

  auto run_chunk = [&](std::size_t c) {
    try {
      Acc acc;
      for (std::size_t i = row_of_chunk[c]; i < row_of_chunk[c + 1]; ++i) {
        const std::size_t len = row_len(i);
        for (std::size_t j = 0; j < len; ++j) acc.add(term(i, j));
      }
      partial[c] = acc.value();
    } catch (...) {
      std::lock_guard<std::mutex> g(err_mu);
      if (!first_error) first_error = std::current_exception();
    }
  };

  const int T = std::max(1, g_threads.load());
  if (T == 1 || n_chunks == 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::future<void>> fs;
    for (int w = 0; w < T; ++w) {
      fs.push_back(std::async(std::launch::async, [&, w]() {
        for (std::size_t c = static_cast<std::size_t>(w); c < n_chunks;
             c += static_cast<std::size_t>(T))
          run_chunk(c);
      }));
    }
    for (auto& f : fs) f.get();
  }
  if (first_error) std::rethrow_exception(first_error);

  Acc total;
  for (std::size_t c = 0; c < n_chunks; ++c) total.add(partial[c]);
  return total.value();
}

}  // namespace

EnergyBreakdown measure_energy(const PiecewiseMeasure& mu, double tol) {
  const auto& atoms = mu.atoms();
  EnergyBreakdown out;
  out.normalization = mu.total_mass();
  if (atoms.empty()) return out;
  check_disjoint_or_identical(atoms);

  const std::size_t n = atoms.size();
  const double denom =
      static_cast<double>(n) + 0.5 * static_cast<double>(n) * (n - 1);
  const double pair_tol = tol / std::max(1.0, denom);

  Acc self;
  for (const Atom& a : atoms)
    self.add(a.weight * a.weight * atom_self_energy(a, pair_tol));
  out.self_sum = self.value();

  out.outer_sum = reduce_pairs(
      n, [&](std::size_t i) { return n - 1 - i; },
      [&](std::size_t i, std::size_t jj) {
        const std::size_t j = i + 1 + jj;
        return 2.0 * atoms[i].weight * atoms[j].weight *
               atom_interaction(atoms[i], atoms[j], pair_tol);
      });

  out.total = out.self_sum + out.outer_sum;
  return out;
}

double mutual_energy(const PiecewiseMeasure& mu, const PiecewiseMeasure& nu,
                     double tol) {
  // Canonical argument order makes the evaluation symmetric bit-for-bit.
  auto atom_key_less = [](const Atom& x, const Atom& y) {
    if (x.interval.center() != y.interval.center())
      return x.interval.center() < y.interval.center();
    if (x.interval.loglen() != y.interval.loglen())
      return x.interval.loglen() < y.interval.loglen();
    return x.weight < y.weight;
  };
  auto measure_less = [&](const PiecewiseMeasure& x,
                          const PiecewiseMeasure& y) {
    return std::lexicographical_compare(x.atoms().begin(), x.atoms().end(),
                                        y.atoms().begin(), y.atoms().end(),
                                        atom_key_less);
  };
  const PiecewiseMeasure& A = measure_less(nu, mu) ? nu : mu;
  const PiecewiseMeasure& B = measure_less(nu, mu) ? mu : nu;

  const std::size_t n = A.size(), m = B.size();
  if (n == 0 || m == 0) return 0.0;
  const double pair_tol = tol / std::max(1.0, static_cast<double>(n * m));
  return reduce_pairs(
      n, [&](std::size_t) { return m; },
      [&](std::size_t i, std::size_t j) {
        return A.atoms()[i].weight * B.atoms()[j].weight *
               atom_interaction(A.atoms()[i], B.atoms()[j], pair_tol);
      });
}

void set_thread_count(int k) { g_threads.store(std::max(1, k)); }
int thread_count() { return g_threads.load(); }

}  // namespace logcap
