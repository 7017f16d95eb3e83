#pragma once

// Internal helpers shared by the energy kernels and the audit machinery:
// antiderivatives of the log kernel against linear factors, and a
// compensated accumulator.

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "logcap/types.hpp"

namespace logcap::detail {

// Kahan-Neumaier accumulator.
struct Acc {
  double sum = 0.0, comp = 0.0;
  void add(double term) {
    const double t = sum + term;
    comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

inline double L0(double t) {  // antiderivative of log|t|
  return t == 0.0 ? 0.0 : t * std::log(std::abs(t)) - t;
}
inline double L1(double t) {  // antiderivative of t log|t|
  return t == 0.0 ? 0.0 : 0.5 * t * t * std::log(std::abs(t)) - 0.25 * t * t;
}
inline double Phi(double t) {  // second antiderivative of log|t|
  return t == 0.0 ? 0.0 : 0.25 * t * t * (2.0 * std::log(std::abs(t)) - 3.0);
}

// \iint_{[a1,b1] x [a2,b2]} log|x-y| dx dy
inline double rect_log_integral(double a1, double b1, double a2, double b2) {
  return Phi(b1 - a2) + Phi(a1 - b2) - Phi(b1 - b2) - Phi(a1 - a2);
}

// \int_p^q (linear density interpolating dp@p, dq@q) * (-log|x-y|) dy.
// Valid for x inside [p,q]; the antiderivatives are continuous through the
// singularity.
inline double seg_neglog_linear(double x, double p, double q, double dp,
                                double dq) {
  const double B = (q == p) ? 0.0 : (dq - dp) / (q - p);
  const double A = dp - B * p;
  return -((A + B * x) * (L0(x - p) - L0(x - q)) - B * (L1(x - p) - L1(x - q)));
}

// \int_lo^hi dens(s(y)) (-log|x-y|) dy with s affine [lo,hi] -> [0,1].
inline double density_neglog_integral(double x, double lo, double hi,
                                      const DensitySpec& d) {
  if (d.is_constant())
    return seg_neglog_linear(x, lo, hi, d.constant_value(), d.constant_value());
  const auto& y = d.ordinates();
  const std::size_t m = y.size() - 1;
  Acc acc;
  for (std::size_t i = 0; i < m; ++i) {
    const double p = lo + (hi - lo) * static_cast<double>(i) / m;
    const double q = lo + (hi - lo) * static_cast<double>(i + 1) / m;
    acc.add(seg_neglog_linear(x, p, q, y[i], y[i + 1]));
  }
  return acc.value();
}

inline double logaddexp(double a, double b) {
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

}  // namespace logcap::detail
