#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <queue>
#include <utility>
#include <vector>

#include "bht/errors.hpp"

namespace bht::quad {

template <class T>
struct Estimate {
  T value{};
  double error = 0.0;
  std::size_t panels = 0;
  /// Error level below which refinement cannot help: 50 eps int |f|.
  double roundoff = 0.0;
};

namespace detail {

// 15-point Kronrod abscissae (positive half) and weights; Gauss-7 weights for
// the odd-indexed abscissae.
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }
inline std::complex<double> as_complex(double v) { return {v, 0.0}; }
inline std::complex<double> as_complex(const std::complex<double>& v) { return v; }

}  // namespace detail

/// Gauss-Kronrod 7/15 on [a, b] with the QUADPACK error estimate.
template <class T, class F>
Estimate<T> gk15(const F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const T fc = f(center);
  T fv1[7];
  T fv2[7];
  T kron = fc * detail::kWgk[7];
  T gauss = fc * detail::kWg[3];
  double resabs = detail::magnitude(fc) * detail::kWgk[7];
  for (int k = 0; k < 7; ++k) {
    const double dx = half * detail::kXgk[k];
    fv1[k] = f(center - dx);
    fv2[k] = f(center + dx);
    kron += (fv1[k] + fv2[k]) * detail::kWgk[k];
    if (k % 2 == 1) gauss += (fv1[k] + fv2[k]) * detail::kWg[k / 2];
    resabs += (detail::magnitude(fv1[k]) + detail::magnitude(fv2[k])) * detail::kWgk[k];
  }
  // QUADPACK's error scaling: K15 is far more accurate than G7, so the raw
  // difference is tempered, then floored at the rounding level.
  const T mean = kron * 0.5;
  double resasc = detail::magnitude(fc - mean) * detail::kWgk[7];
  for (int k = 0; k < 7; ++k) {
    resasc += (detail::magnitude(fv1[k] - mean) + detail::magnitude(fv2[k] - mean)) * detail::kWgk[k];
  }
  const double h = std::abs(half);
  resabs *= h;
  resasc *= h;
  double err = detail::magnitude((kron - gauss) * half);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double floor = 50.0 * std::numeric_limits<double>::epsilon() * resabs;
  if (resabs > std::numeric_limits<double>::min() / (50.0 * std::numeric_limits<double>::epsilon())) {
    err = std::max(floor, err);
  }
  return {kron * half, err, 1, floor};
}

struct Options {
  /// Stop when the summed error estimate is below max(abs_tol, rel_tol*|I|)
  /// and every panel is below panel_tol.
  double abs_tol = 1e-8;
  double rel_tol = 0.0;
  double panel_tol = 1e-10;
  std::size_t max_panels = 2'000'000;
};

using Panel = std::pair<double, double>;

/// Global adaptive refinement over a list of (possibly disjoint) panels.
/// Throws ToleranceError carrying the best estimate when the budget runs out.
/// The final partition is written to `final_panels` when given.
template <class T, class F>
Estimate<T> integrate_panels(const F& f, const std::vector<Panel>& initial,
                             const Options& opt = {},
                             std::vector<Panel>* final_panels = nullptr) {
  struct Item {
    double a, b;
    T value;
    double error;
    double floor;
  };
  std::vector<Item> items;
  items.reserve(initial.size());
  T running{};
  double total_err = 0.0;
  double worst_err = 0.0;
  for (const auto& [a, b] : initial) {
    if (!(b > a)) continue;
    auto e = gk15<T>(f, a, b);
    items.push_back({a, b, e.value, e.error, e.roundoff});
    running += e.value;
    total_err += e.error;
    worst_err = std::max(worst_err, e.error);
  }
  auto finish = [&]() {
    // Fixed left-to-right summation keeps the result independent of the
    // refinement order.
    std::sort(items.begin(), items.end(), [](const Item& x, const Item& y) { return x.a < y.a; });
    Estimate<T> out;
    for (const auto& it : items) {
      out.value += it.value;
      out.error += it.error;
      out.roundoff += it.floor;
    }
    out.panels = items.size();
    if (final_panels != nullptr) {
      final_panels->clear();
      for (const auto& it : items) final_panels->push_back({it.a, it.b});
    }
    return out;
  };
  auto target = [&]() { return std::max(opt.abs_tol, opt.rel_tol * detail::magnitude(running)); };
  if (total_err <= target() && worst_err <= opt.panel_tol) return finish();

  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry> heap;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].error > items[i].floor) heap.push({items[i].error, i});
  }
  while (!heap.empty()) {
    if (total_err <= target() && heap.top().first <= opt.panel_tol) break;
    const std::size_t idx = heap.top().second;
    heap.pop();
    const Item worst = items[idx];
    const double mid = 0.5 * (worst.a + worst.b);
    const double scale = std::max(std::abs(worst.a), std::abs(worst.b));
    if (worst.b - worst.a <= 128 * std::numeric_limits<double>::epsilon() * scale) continue;
    if (items.size() + 1 > opt.max_panels) {
      auto best = finish();
      throw ToleranceError("quadrature panel budget exhausted", detail::as_complex(best.value),
                           best.error);
    }
    auto left = gk15<T>(f, worst.a, mid);
    auto right = gk15<T>(f, mid, worst.b);
    running += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    items[idx] = {worst.a, mid, left.value, left.error, left.roundoff};
    items.push_back({mid, worst.b, right.value, right.error, right.roundoff});
    // Panels already at their rounding level cannot improve by splitting.
    if (left.error > left.roundoff) heap.push({left.error, idx});
    if (right.error > right.roundoff) heap.push({right.error, items.size() - 1});
  }
  return finish();
}

template <class T, class F>
Estimate<T> integrate(const F& f, double a, double b, const Options& opt = {}) {
  return integrate_panels<T>(f, std::vector<Panel>{{a, b}}, opt);
}

/// Splits [a, b] so that every kept panel is at most a quarter of the local
/// oscillation wavelength. `freq_bound(lo, hi)` bounds the local frequency in
/// cycles per unit; `negligible(lo, hi)` lets the caller drop panels on which
/// the integrand is provably below working precision.
template <class FreqBound, class Negligible>
std::vector<Panel> oscillation_panels(double a, double b, const FreqBound& freq_bound,
                                      const Negligible& negligible,
                                      std::size_t max_panels = 2'000'000) {
  std::vector<Panel> out;
  std::vector<Panel> stack{{a, b}};
  while (!stack.empty()) {
    auto [lo, hi] = stack.back();
    stack.pop_back();
    if (!(hi > lo)) continue;
    if (negligible(lo, hi)) continue;
    const double nu = freq_bound(lo, hi);
    const double scale = std::max(std::abs(lo), std::abs(hi));
    const bool tiny = hi - lo <= 1e3 * std::numeric_limits<double>::epsilon() * scale;
    if (tiny || (hi - lo) * nu <= 0.25) {
      out.push_back({lo, hi});
      if (out.size() > max_panels) {
        throw ToleranceError("oscillation panel budget exhausted", {},
                             std::numeric_limits<double>::infinity());
      }
      continue;
    }
    const double mid = 0.5 * (lo + hi);
    // Push right first so panels come out left to right.
    stack.push_back({mid, hi});
    stack.push_back({lo, mid});
  }
  return out;
}

}  // namespace bht::quad
