#include "logcap/types.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace logcap {

Interval::Interval(double center, double loglen)
    : center_(center), loglen_(loglen) {
  if (!(center >= 0.0 && center <= 1.0))
    throw std::invalid_argument("interval center outside [0,1]");
  if (!(loglen <= 0.0) || std::isnan(loglen))
    throw std::invalid_argument("interval loglen must be <= 0");
}

double Interval::length() const { return std::exp(loglen_); }

Interval::Endpoints Interval::endpoints() const {
  const double h = 0.5 * std::exp(loglen_);
  double lo = center_ - h;
  double hi = center_ + h;
  bool clipped = false;
  if (lo < 0.0) {
    lo = 0.0;
    clipped = true;
  }
  if (hi > 1.0) {
    hi = 1.0;
    clipped = true;
  }
  return {lo, hi, clipped};
}

Interval Interval::from_endpoints(double lo, double hi) {
  if (!(lo >= 0.0 && hi <= 1.0 && hi > lo))
    throw std::invalid_argument("bad endpoints");
  return Interval(0.5 * (lo + hi), std::log(hi - lo));
}

DensitySpec DensitySpec::constant(double value) {
  if (!(value >= 0.0) || !std::isfinite(value))
    throw std::invalid_argument("density value must be finite and >= 0");
  DensitySpec d;
  d.constant_ = true;
  d.value_ = value;
  d.mean_ = value;
  d.mean_square_ = value * value;
  return d;
}

DensitySpec DensitySpec::sampled(std::vector<double> ordinates) {
  if (ordinates.size() < 2)
    throw std::invalid_argument("sampled density needs >= 2 ordinates");
  for (double v : ordinates)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("density ordinates must be finite and >= 0");
  DensitySpec d;
  d.constant_ = false;
  d.ordinates_ = std::move(ordinates);
  const auto& y = d.ordinates_;
  const std::size_t m = y.size() - 1;
  double s = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    s += 0.5 * (y[i] + y[i + 1]);
    // integral of the linear piece squared
    s2 += (y[i] * y[i] + y[i] * y[i + 1] + y[i + 1] * y[i + 1]) / 3.0;
  }
  d.mean_ = s / static_cast<double>(m);
  d.mean_square_ = s2 / static_cast<double>(m);
  return d;
}

double DensitySpec::at(double s) const {
  if (constant_) return value_;
  const std::size_t m = ordinates_.size() - 1;
  double t = s * static_cast<double>(m);
  if (t <= 0.0) return ordinates_.front();
  if (t >= static_cast<double>(m)) return ordinates_.back();
  const std::size_t i = static_cast<std::size_t>(t);
  const double frac = t - static_cast<double>(i);
  return ordinates_[i] * (1.0 - frac) + ordinates_[i + 1] * frac;
}

double DensitySpec::mean() const { return mean_; }
double DensitySpec::mean_square() const { return mean_square_; }

void PiecewiseMeasure::add(const Interval& iv, const DensitySpec& d,
                           double weight) {
  if (!(weight >= 0.0) || !std::isfinite(weight))
    throw std::invalid_argument("atom weight must be finite and >= 0");
  atoms_.push_back(Atom{iv, d, weight});
}

double PiecewiseMeasure::total_mass() const {
  double s = 0.0, comp = 0.0;
  for (const Atom& a : atoms_) {
    const double term = a.weight * a.density.mean();
    const double t = s + term;
    comp += std::abs(s) >= std::abs(term) ? (s - t) + term : (term - t) + s;
    s = t;
  }
  return s + comp;
}

bool PiecewiseMeasure::is_probability(double tol) const {
  return std::abs(total_mass() - 1.0) <= tol;
}

void PiecewiseMeasure::scale_weights(double c) {
  for (Atom& a : atoms_) a.weight *= c;
}

PiecewiseMeasure PiecewiseMeasure::normalized() const {
  const double m = total_mass();
  if (!(m > 0.0)) throw Error("cannot normalize a measure with mass <= 0");
  PiecewiseMeasure out = *this;
  out.scale_weights(1.0 / m);
  return out;
}

PiecewiseMeasure split_to_disjoint(const PiecewiseMeasure& mu) {
  // Collect all endpoints as cut points, then re-emit each atom piecewise.
  std::vector<double> cuts;
  for (const Atom& a : mu.atoms()) {
    const auto e = a.interval.endpoints();
    cuts.push_back(e.lo);
    cuts.push_back(e.hi);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  PiecewiseMeasure out;
  for (const Atom& a : mu.atoms()) {
    const auto e = a.interval.endpoints();
    const double len = e.hi - e.lo;
    if (len <= 0.0) {
      out.add(a.interval, a.density, a.weight);
      continue;
    }
    std::vector<double> pts{e.lo};
    for (double c : cuts)
      if (c > e.lo && c < e.hi) pts.push_back(c);
    pts.push_back(e.hi);
    if (pts.size() == 2) {
      out.add(a.interval, a.density, a.weight);
      continue;
    }
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      const double lo = pts[i], hi = pts[i + 1];
      const double frac = (hi - lo) / len;
      DensitySpec piece = a.density;
      if (!a.density.is_constant()) {
        const int kNodes = 17;
        std::vector<double> ords(kNodes);
        for (int k = 0; k < kNodes; ++k) {
          const double x = lo + (hi - lo) * k / (kNodes - 1);
          ords[k] = a.density.at((x - e.lo) / len);
        }
        piece = DensitySpec::sampled(ords);
      }
      out.add(Interval::from_endpoints(lo, hi), piece, a.weight * frac);
    }
  }
  out.mark_disjoint(true);
  return out;
}

}  // namespace logcap
