#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "bht/polynomial.hpp"

namespace bht {

/// Closed interval [lo, hi] with the arithmetic needed for polynomial range
/// enclosures. Rounding is not directed; callers pad the result.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  double mag() const { return std::max(std::abs(lo), std::abs(hi)); }
  bool intersects(double a, double b) const { return hi >= a && lo <= b; }

  friend Interval operator+(Interval a, Interval b) { return {a.lo + b.lo, a.hi + b.hi}; }
  friend Interval operator+(Interval a, double s) { return {a.lo + s, a.hi + s}; }
  friend Interval operator*(Interval a, Interval b) {
    const double p[] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
    return {*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
  }
  friend Interval operator-(double s, Interval a) { return {s - a.hi, s - a.lo}; }
};

/// Double-precision copy of a Polynomial for hot loops.
class RealPoly {
 public:
  RealPoly() = default;
  explicit RealPoly(std::vector<double> coeffs) : c_(std::move(coeffs)) {}
  explicit RealPoly(const Polynomial& p) : c_(p.to_doubles()) {}

  double operator()(double t) const {
    double acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * t + *it;
    return acc;
  }

  RealPoly derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<double> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * static_cast<double>(k);
    return RealPoly(std::move(d));
  }

  /// Enclosure of { p(t) : t in [lo, hi] } by interval Horner, padded by a
  /// relative margin to absorb rounding.
  Interval range(double lo, double hi) const {
    if (c_.empty()) return {0.0, 0.0};
    const Interval t{lo, hi};
    Interval acc{c_.back(), c_.back()};
    for (std::size_t k = c_.size() - 1; k-- > 0;) acc = acc * t + c_[k];
    const double pad = 1e-12 * (acc.mag() + 1.0);
    return {acc.lo - pad, acc.hi + pad};
  }

  /// Upper bound on |p| over [lo, hi].
  double max_abs(double lo, double hi) const { return range(lo, hi).mag(); }

  const std::vector<double>& coeffs() const noexcept { return c_; }
  bool is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](double v) { return v == 0.0; });
  }

 private:
  std::vector<double> c_;
};

}  // namespace bht
