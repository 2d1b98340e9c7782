#pragma once

// Reference computations used only by the tests. They deliberately avoid the
// library's quadrature and root-finding code.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace oracle {

/// Composite Simpson on [a, b] with n (even) subintervals.
template <class T, class F>
T simpson(const F& f, double a, double b, std::size_t n) {
  if (n % 2) ++n;
  const double h = (b - a) / static_cast<double>(n);
  T acc = f(a) + f(b);
  for (std::size_t i = 1; i < n; ++i) {
    const double w = (i % 2) ? 4.0 : 2.0;
    acc += w * f(a + static_cast<double>(i) * h);
  }
  return acc * (h / 3.0);
}

inline double horner(const std::vector<double>& c, double t) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
  return acc;
}

inline std::vector<double> differentiate(const std::vector<double>& c) {
  std::vector<double> d;
  for (std::size_t k = 1; k < c.size(); ++k) d.push_back(c[k] * static_cast<double>(k));
  return d;
}

/// Largest multiplicity among the nonzero real roots of the polynomial with
/// coefficients c (c[k] multiplies t^k), or 0 when there is none. A root of
/// multiplicity k is a sign change of the (k-1)-th derivative at which every
/// lower derivative vanishes; roots are bracketed on a dense grid and bisected.
inline int max_root_multiplicity(const std::vector<double>& c) {
  if (c.size() < 2) return 0;
  double bound = 1.0;
  for (std::size_t k = 0; k + 1 < c.size(); ++k)
    bound = std::max(bound, 1.0 + std::abs(c[k] / c.back()));

  std::vector<std::vector<double>> ders{c};
  while (ders.back().size() > 1) ders.push_back(differentiate(ders.back()));

  auto scale = [&](std::size_t l, double r) {
    double s = 0.0;
    for (std::size_t k = 0; k < ders[l].size(); ++k) s += std::abs(ders[l][k]) * std::pow(std::abs(r), k);
    return s;
  };

  int best = 0;
  const std::size_t n = 400000;
  for (std::size_t i = 0; i + 1 < ders.size(); ++i) {
    const auto& h = ders[i];
    std::vector<double> roots;
    double prev_t = -bound, prev_v = horner(h, prev_t);
    for (std::size_t s = 1; s <= n; ++s) {
      const double t = -bound + 2.0 * bound * static_cast<double>(s) / static_cast<double>(n);
      const double v = horner(h, t);
      if (v == 0.0) {
        roots.push_back(t);
      } else if (prev_v != 0.0 && (v > 0) != (prev_v > 0)) {
        double lo = prev_t, hi = t, flo = prev_v;
        for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
          const double mid = 0.5 * (lo + hi);
          if (mid == lo || mid == hi) break;
          const double fm = horner(h, mid);
          if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
          } else {
            hi = mid;
          }
        }
        roots.push_back(0.5 * (lo + hi));
      }
      prev_t = t;
      prev_v = v;
    }
    for (double r : roots) {
      if (std::abs(r) < 1e-9) continue;
      bool common = true;
      for (std::size_t l = 0; l < i && common; ++l)
        common = std::abs(horner(ders[l], r)) <= 1e-7 * scale(l, r);
      if (common) best = std::max(best, static_cast<int>(i) + 1);
    }
  }
  return best;
}

}  // namespace oracle
