#include "bht/pvquad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bht/errors.hpp"
#include "bht/kernels.hpp"
#include "bht/parallel.hpp"
#include "bht/quadrature.hpp"
#include "bht/realpoly.hpp"

namespace bht {

namespace {

constexpr double kPi = std::numbers::pi;
using cplx = std::complex<double>;

// F(t) = f(x - P(t)) g(x - Q(t)) with the panel helpers shared by every
// time-domain routine.
struct Bilinear {
  RealPoly P, Q, dP, dQ;
  const TestFunction& f;
  const TestFunction& g;
  double x;
  double wf, wg;

  Bilinear(const Polynomial& p, const Polynomial& q, const TestFunction& f_,
           const TestFunction& g_, double x_)
      : P(p), Q(q), dP(P.derivative()), dQ(Q.derivative()), f(f_), g(g_), x(x_),
        wf(f_.frequency_bound()), wg(g_.frequency_bound()) {}

  cplx operator()(double t) const { return f(x - P(t)) * g(x - Q(t)); }

  bool side_negligible(double lo, double hi) const {
    const Interval rp = P.range(lo, hi);
    if (f.negligible_on(x - rp.hi, x - rp.lo)) return true;
    const Interval rq = Q.range(lo, hi);
    return g.negligible_on(x - rq.hi, x - rq.lo);
  }
  // Both t and -t branches vanish on [lo, hi].
  bool negligible(double lo, double hi) const {
    return side_negligible(lo, hi) && side_negligible(-hi, -lo);
  }
  double side_freq(double lo, double hi) const {
    return dP.max_abs(lo, hi) * wf + dQ.max_abs(lo, hi) * wg;
  }
  double freq(double lo, double hi) const {
    return std::max(side_freq(lo, hi), side_freq(-hi, -lo));
  }
};

quad::Options to_quad(const PVOptions& opt, double abs_tol) {
  quad::Options q;
  q.abs_tol = abs_tol;
  q.panel_tol = opt.panel_tol;
  q.max_panels = opt.max_panels;
  return q;
}

// int_lo^hi (F(t) - F(-t)) / t dt.
quad::Estimate<cplx> pv_segment(const Bilinear& F, double lo, double hi, const PVOptions& opt,
                                double abs_tol) {
  if (!(hi > lo)) return {};
  auto freq = [&](double a, double b) { return F.freq(a, b) + 1.0 / a; };
  auto negl = [&](double a, double b) { return F.negligible(a, b); };
  const auto panels = quad::oscillation_panels(lo, hi, freq, negl, opt.max_panels);
  auto integrand = [&](double t) -> cplx { return (F(t) - F(-t)) / t; };
  return quad::integrate_panels<cplx>(integrand, panels, to_quad(opt, abs_tol));
}

// Closed intervals covering the numerical support of a combination of atoms.
std::vector<quad::Panel> atom_windows(const TestFunction& h) {
  std::vector<quad::Panel> w;
  for (const auto& a : h.atoms()) {
    w.push_back({a.center - kAtomReach * a.sigma, a.center + kAtomReach * a.sigma});
  }
  std::sort(w.begin(), w.end());
  std::vector<quad::Panel> merged;
  for (const auto& p : w) {
    if (!merged.empty() && p.first <= merged.back().second) {
      merged.back().second = std::max(merged.back().second, p.second);
    } else {
      merged.push_back(p);
    }
  }
  return merged;
}

std::vector<quad::Panel> clip(const std::vector<quad::Panel>& windows, double lo, double hi) {
  std::vector<quad::Panel> out;
  for (const auto& [a, b] : windows) {
    const double l = std::max(a, lo), h = std::min(b, hi);
    if (h > l) out.push_back({l, h});
  }
  return out;
}

std::vector<quad::Panel> split_at(const std::vector<quad::Panel>& windows, double c) {
  std::vector<quad::Panel> out;
  for (const auto& [a, b] : windows) {
    if (a < c && c < b) {
      out.push_back({a, c});
      out.push_back({c, b});
    } else {
      out.push_back({a, b});
    }
  }
  return out;
}

std::vector<quad::Panel> wavelength_panels(const std::vector<quad::Panel>& windows, double nu,
                                           std::size_t budget) {
  std::vector<quad::Panel> out;
  auto freq = [&](double, double) { return nu; };
  auto none = [](double, double) { return false; };
  for (const auto& [a, b] : windows) {
    auto p = quad::oscillation_panels(a, b, freq, none, budget);
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

// Composite Kronrod-15 nodes with the embedded Gauss-7 weights alongside.
struct TensorNodes {
  std::vector<double> x, wk, wg;
};

TensorNodes gk_nodes(const std::vector<quad::Panel>& panels) {
  TensorNodes n;
  for (const auto& [a, b] : panels) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (int k = 0; k < 15; ++k) {
      const int i = k < 7 ? k : (k == 7 ? 7 : 14 - k);
      const double s = k < 7 ? -quad::detail::kXgk[i] : quad::detail::kXgk[i];
      n.x.push_back(c + h * s);
      n.wk.push_back(h * quad::detail::kWgk[i]);
      // Gauss nodes are the odd Kronrod indices and the center.
      double wg = 0.0;
      if (i == 7) wg = quad::detail::kWg[3];
      else if (i % 2 == 1) wg = quad::detail::kWg[i / 2];
      n.wg.push_back(h * wg);
    }
  }
  return n;
}

double max_abs_x(const std::vector<double>& xs) {
  double m = 0.0;
  for (double v : xs) m = std::max(m, std::abs(v));
  return m;
}

// iint fhat ghat e^{2 pi i (xi + eta) x} M(xi, eta) on tensor GK grids whose
// panels span 1/refine wavelengths of the frequency bound. The bound is loose
// for Gaussian envelopes, so refine starts at 1/4 and doubles until the
// Kronrod/Gauss difference is below tol.
template <class Symbol>
ScalePiece tensor_evaluate(const TestFunction& f, const TestFunction& g,
                           const std::vector<quad::Panel>& xi_windows,
                           const std::vector<quad::Panel>& eta_windows, double xi_nu,
                           double eta_nu, const Symbol& symbol, const std::vector<double>& xs,
                           double tol, int j) {
  const TestFunction fh = fourier_transform(f);
  const TestFunction gh = fourier_transform(g);
  ScalePiece out;
  out.j = j;
  out.xs = xs;
  out.values.assign(xs.size(), {});
  out.errors.assign(xs.size(), 0.0);
  if (f.is_zero() || g.is_zero() || xs.empty()) return out;
  for (double refine = 0.25;; refine *= 2.0) {
    const auto nx = gk_nodes(wavelength_panels(xi_windows, 0.25 * refine * xi_nu, 1'000'000));
    const auto ny = gk_nodes(wavelength_panels(eta_windows, 0.25 * refine * eta_nu, 1'000'000));
    const std::size_t NX = nx.x.size(), NY = ny.x.size();
    std::vector<cplx> M(NX * NY);
    std::vector<double> Merr(NX * NY);
    parallel_for(NX, [&](std::size_t i) {
      for (std::size_t k = 0; k < NY; ++k) {
        const SymbolSample s = symbol(nx.x[i], ny.x[k]);
        M[i * NY + k] = s.value;
        Merr[i * NY + k] = s.abs_error;
      }
    });
    std::vector<cplx> fv(NX), gv(NY);
    for (std::size_t i = 0; i < NX; ++i) fv[i] = fh(nx.x[i]);
    for (std::size_t k = 0; k < NY; ++k) gv[k] = gh(ny.x[k]);
    bool ok = true;
    for (std::size_t r = 0; r < xs.size(); ++r) {
      const double x = xs[r];
      std::vector<cplx> ey(NY);
      for (std::size_t k = 0; k < NY; ++k) {
        ey[k] = gv[k] * std::polar(1.0, 2.0 * kPi * ny.x[k] * x);
      }
      cplx sk{}, sg{};
      double serr = 0.0;
      for (std::size_t i = 0; i < NX; ++i) {
        const cplx ex = fv[i] * std::polar(1.0, 2.0 * kPi * nx.x[i] * x);
        cplx rk{}, rg{};
        double re = 0.0;
        for (std::size_t k = 0; k < NY; ++k) {
          const cplx v = ey[k] * M[i * NY + k];
          rk += ny.wk[k] * v;
          rg += ny.wg[k] * v;
          re += ny.wk[k] * std::abs(ey[k]) * Merr[i * NY + k];
        }
        sk += nx.wk[i] * ex * rk;
        sg += nx.wg[i] * ex * rg;
        serr += nx.wk[i] * std::abs(ex) * re;
      }
      out.values[r] = sk;
      out.errors[r] = std::abs(sk - sg) + serr;
      if (out.errors[r] > tol) ok = false;
    }
    if (ok || refine >= 16.0) return out;
  }
}

}  // namespace

PVResult bht_truncated(const Polynomial& p, const Polynomial& q, const TestFunction& f,
                       const TestFunction& g, double x, double eps, double R,
                       const PVOptions& opt) {
  if (!(eps > 0.0) || !(R > eps)) throw PreconditionError("need 0 < eps < R");
  PVResult res;
  res.epsilon_schedule = {{2.0 * eps, 0.5 * R}, {eps, R}};
  if (f.is_zero() || g.is_zero()) return res;
  const Bilinear F(p, q, f, g, x);
  if (4.0 * eps >= R) {
    const auto e = pv_segment(F, eps, R, opt, opt.total_tol);
    res.epsilon_schedule = {{eps, R}};
    res.value = e.value;
    res.quadrature_error = e.error;
    res.convergence_estimate = std::abs(e.value);
    return res;
  }
  const double t = opt.total_tol / 3.0;
  const auto inner = pv_segment(F, eps, 2.0 * eps, opt, t);
  const auto middle = pv_segment(F, 2.0 * eps, 0.5 * R, opt, t);
  const auto outer = pv_segment(F, 0.5 * R, R, opt, t);
  res.value = inner.value + middle.value + outer.value;
  res.quadrature_error = inner.error + middle.error + outer.error;
  res.convergence_estimate = std::abs(inner.value) + std::abs(outer.value);
  return res;
}

std::complex<double> linear_multiplier_oracle(double alpha, double beta, const TestFunction& f,
                                              const TestFunction& g, double x, double tol) {
  if (alpha == beta) throw PreconditionError("linear oracle needs alpha != beta");
  if (f.is_zero() || g.is_zero()) return {};
  const TestFunction fh = fourier_transform(f);
  const TestFunction gh = fourier_transform(g);
  const auto fw = atom_windows(fh);
  const auto gw = atom_windows(gh);
  const double nu_xi = fh.frequency_bound() + std::abs(x);
  const double nu_eta = gh.frequency_bound() + std::abs(x);
  quad::Options inner_opt;
  inner_opt.abs_tol = 0.1 * tol;
  inner_opt.panel_tol = std::numeric_limits<double>::infinity();
  const std::vector<quad::Panel> fixed = wavelength_panels(fw, nu_xi, 2'000'000);
  auto inner = [&](double eta) -> cplx {
    std::vector<quad::Panel> panels = fixed;
    double sign_const = 0.0;
    if (alpha != 0.0) {
      panels = split_at(panels, -beta * eta / alpha);
    } else {
      sign_const = (beta * eta > 0.0) ? 1.0 : (beta * eta < 0.0 ? -1.0 : 0.0);
    }
    auto integrand = [&](double xi) -> cplx {
      const double arg = alpha * xi + beta * eta;
      const double s = alpha != 0.0 ? (arg > 0.0 ? 1.0 : (arg < 0.0 ? -1.0 : 0.0)) : sign_const;
      if (s == 0.0) return {};
      return s * fh(xi) * std::polar(1.0, 2.0 * kPi * xi * x);
    };
    return quad::integrate_panels<cplx>(integrand, panels, inner_opt).value;
  };
  quad::Options outer_opt;
  outer_opt.abs_tol = tol;
  outer_opt.panel_tol = std::numeric_limits<double>::infinity();
  auto outer = [&](double eta) -> cplx {
    return gh(eta) * std::polar(1.0, 2.0 * kPi * eta * x) * inner(eta);
  };
  const auto est =
      quad::integrate_panels<cplx>(outer, wavelength_panels(gw, nu_eta, 2'000'000), outer_opt);
  return cplx(0.0, -kPi) * est.value;
}

ScalePiece tj(const Polynomial& p, const Polynomial& q, const TestFunction& f,
              const TestFunction& g, int j, const std::vector<double>& xs, const PVOptions& opt) {
  static const DyadicKernel rho = make_rho();
  ScalePiece out;
  out.j = j;
  out.xs = xs;
  out.values.assign(xs.size(), {});
  out.errors.assign(xs.size(), 0.0);
  if (f.is_zero() || g.is_zero()) return out;
  const double lo = std::ldexp(1.0, -j - 1);
  const double hi = std::ldexp(1.0, -j + 1);
  parallel_for(xs.size(), [&](std::size_t i) {
    const Bilinear F(p, q, f, g, xs[i]);
    auto freq = [&](double a, double b) { return F.freq(a, b) + 2.0 / (hi - lo); };
    auto negl = [&](double a, double b) { return F.negligible(a, b); };
    const auto panels = quad::oscillation_panels(lo, hi, freq, negl, opt.max_panels);
    auto integrand = [&](double t) -> cplx {
      const double k = rho.scaled(j, t);
      if (k == 0.0) return {};
      return k * (F(t) - F(-t));
    };
    const auto est = quad::integrate_panels<cplx>(integrand, panels, to_quad(opt, opt.total_tol));
    out.values[i] = est.value;
    out.errors[i] = est.error;
  });
  return out;
}

ScalePiece tj_frequency(const Polynomial& p, const Polynomial& q, const TestFunction& f,
                        const TestFunction& g, int j, const std::vector<double>& xs, double tol) {
  const TestFunction fh = fourier_transform(f);
  const TestFunction gh = fourier_transform(g);
  const double hi = std::ldexp(1.0, -j + 1);
  const RealPoly P(p), Q(q);
  const double pmax = P.max_abs(-hi, hi), qmax = Q.max_abs(-hi, hi);
  const double xmax = max_abs_x(xs);
  SymbolOptions so;
  so.abs_tol = 1e-12;
  auto symbol = [&](double xi, double eta) { return mj(p, q, j, xi, eta, false, so); };
  return tensor_evaluate(f, g, atom_windows(fh), atom_windows(gh),
                         fh.frequency_bound() + xmax + pmax, gh.frequency_bound() + xmax + qmax,
                         symbol, xs, tol, j);
}

ScalePiece tjmn(const Polynomial& p, const Polynomial& q, const TestFunction& f,
                const TestFunction& g, int j, int m, int n, const std::vector<double>& xs,
                double tol) {
  const PhaseModel model(p, q, j);
  const int kx = model.a * j + m, ky = model.b * j + n;
  if (xs.size() >= 2) {
    const double h = std::abs(xs[1] - xs[0]);
    bool uniform = h > 0.0;
    for (std::size_t i = 2; i < xs.size() && uniform; ++i) {
      uniform = std::abs(std::abs(xs[i] - xs[i - 1]) - h) <= 1e-9 * h;
    }
    if (uniform) {
      const double nyq = 0.5 / h;
      auto check = [&](const TestFunction& h_, int k, const char* which) {
        if (std::ldexp(1.0, k + 1) > nyq &&
            spectral_mass_beyond(h_, std::max(nyq, std::ldexp(1.0, k - 1))) > 1e-12) {
          throw BandError(std::string("band 2^") + std::to_string(k) + " of " + which +
                          " passes the Nyquist frequency " + std::to_string(nyq) + " of the x grid");
        }
      };
      check(f, kx, "f");
      check(g, ky, "g");
    }
  }
  const TestFunction fh = fourier_transform(f);
  const TestFunction gh = fourier_transform(g);
  auto band = [](const std::vector<quad::Panel>& w, int k) {
    const double lo = std::ldexp(1.0, k - 1), hi = std::ldexp(1.0, k + 1);
    auto neg = clip(w, -hi, -lo);
    const auto pos = clip(w, lo, hi);
    neg.insert(neg.end(), pos.begin(), pos.end());
    return neg;
  };
  const double hi = std::ldexp(1.0, -j + 1);
  const RealPoly P(p), Q(q);
  const double xmax = max_abs_x(xs);
  // The cutoff varies on the scale of its band; 16 wavelengths per band.
  const double nu_x = fh.frequency_bound() + xmax + P.max_abs(-hi, hi) + 16.0 / std::ldexp(1.0, kx);
  const double nu_y = gh.frequency_bound() + xmax + Q.max_abs(-hi, hi) + 16.0 / std::ldexp(1.0, ky);
  SymbolOptions so;
  so.abs_tol = 1e-12;
  auto symbol = [&](double xi, double eta) { return band_symbol(model, m, n, xi, eta, so); };
  return tensor_evaluate(f, g, band(atom_windows(fh), kx), band(atom_windows(gh), ky), nu_x, nu_y,
                         symbol, xs, tol, j);
}

std::vector<double> default_eps_grid() {
  std::vector<double> e;
  for (int k = -40; k <= 12; ++k) e.push_back(std::pow(2.0, 0.5 * k));
  return e;
}

MaximalReport maximal(const Polynomial& p, const Polynomial& q, const TestFunction& f,
                      const TestFunction& g, double x, const std::vector<double>& eps_grid,
                      const PVOptions& opt) {
  MaximalReport rep;
  rep.eps = eps_grid;
  std::sort(rep.eps.begin(), rep.eps.end());
  if (rep.eps.empty() || !(rep.eps.front() > 0.0)) {
    throw PreconditionError("maximal needs a nonempty grid of positive eps");
  }
  for (std::size_t i = 1; i < rep.eps.size(); ++i) {
    if (rep.eps[i] > 2.0 * rep.eps[i - 1] * (1.0 + 1e-12)) {
      throw PreconditionError("maximal eps grid ratio exceeds 2");
    }
  }
  const std::size_t N = rep.eps.size();
  rep.averages.assign(N, 0.0);
  rep.signed_averages.assign(N, 0.0);
  if (f.is_zero() || g.is_zero()) return rep;
  const Bilinear F(p, q, f, g, x);
  double abs_acc = 0.0;
  cplx signed_acc{};
  double lo = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double hi = rep.eps[i];
    auto freq = [&](double a, double b) { return F.freq(a, b) + 2.0 / (hi - lo); };
    auto negl = [&](double a, double b) { return F.negligible(a, b); };
    const auto panels = quad::oscillation_panels(lo, hi, freq, negl, opt.max_panels);
    auto abs_integrand = [&](double t) { return std::abs(F(t)) + std::abs(F(-t)); };
    std::vector<quad::Panel> final_panels;
    const auto est = quad::integrate_panels<double>(
        abs_integrand, panels, to_quad(opt, opt.total_tol / static_cast<double>(N)), &final_panels);
    // Both integrals are re-summed on the final partition in the same order,
    // so |int F| <= int |F| holds node by node (with equality, bit for bit,
    // when F is real and positive).
    auto signed_integrand = [&](double t) { return F(t) + F(-t); };
    std::sort(final_panels.begin(), final_panels.end());
    for (const auto& [a, b] : final_panels) {
      signed_acc += quad::gk15<cplx>(signed_integrand, a, b).value;
      abs_acc += quad::gk15<double>(abs_integrand, a, b).value;
    }
    rep.quadrature_error += est.error;
    rep.averages[i] = abs_acc / (2.0 * hi);
    rep.signed_averages[i] = std::abs(signed_acc) / (2.0 * hi);
    // |int F| <= int |F| holds exactly; an excess of a few ulps is rounding in
    // the complex modulus and is removed. Larger excesses are left visible.
    const double excess = rep.signed_averages[i] - rep.averages[i];
    if (excess > 0.0 && excess <= 64.0 * std::numeric_limits<double>::epsilon() * rep.averages[i]) {
      rep.signed_averages[i] = rep.averages[i];
    }
    lo = hi;
  }
  const auto it = std::max_element(rep.averages.begin(), rep.averages.end());
  rep.value = *it;
  rep.argmax_eps = rep.eps[static_cast<std::size_t>(it - rep.averages.begin())];
  rep.upper_bound = rep.value;
  for (std::size_t i = 0; i + 1 < N; ++i) {
    rep.upper_bound = std::max(rep.upper_bound, rep.eps[i + 1] / rep.eps[i] * rep.averages[i + 1]);
  }
  return rep;
}

JacobianScan jacobian_scan(const Polynomial& p, const Polynomial& q, const Rational& t0,
                           const std::vector<int>& j_range) {
  if (t0 == 0) throw PreconditionError("jacobian scan needs t0 != 0");
  const Polynomial diff = q.derivative() - p.derivative();
  if (diff.is_zero()) throw DegeneratePairError("P' - Q' vanishes identically");
  const int d = root_multiplicity(diff, t0);
  if (d < 1) throw PreconditionError("t0 = " + to_string(t0) + " is not a root of Q' - P'");
  JacobianScan scan;
  scan.multiplicity = d;
  scan.jacobian = recenter(q, t0).derivative() - recenter(p, t0).derivative();
  const RealPoly J(scan.jacobian);
  constexpr int kSamples = 1000;
  for (int j : j_range) {
    JacobianRow row;
    row.j = j;
    row.min_abs = std::numeric_limits<double>::infinity();
    const double lo = std::ldexp(1.0, -j - 1), hi = std::ldexp(1.0, -j + 1);
    for (double sgn : {1.0, -1.0}) {
      auto h = [&](double s) { return J(sgn * s); };
      double prev_s = lo, prev_v = h(lo);
      std::size_t best = 0;
      double best_v = std::abs(prev_v);
      std::vector<double> ss(kSamples + 1);
      for (int k = 0; k <= kSamples; ++k) ss[k] = lo + (hi - lo) * k / kSamples;
      for (int k = 0; k <= kSamples; ++k) {
        const double s = ss[k], v = h(s);
        if (k > 0 && (v == 0.0 || (v > 0.0) != (prev_v > 0.0))) {
          // A root inside the annulus: locate it by bisection.
          double a = prev_s, b = s, fa = prev_v;
          for (int it = 0; it < 200 && b - a > 0.0; ++it) {
            const double c = 0.5 * (a + b);
            const double fc = h(c);
            if (fc == 0.0) {
              a = b = c;
              break;
            }
            if ((fc > 0.0) == (fa > 0.0)) {
              a = c;
              fa = fc;
            } else {
              b = c;
            }
            if (c == a && c == b) break;
          }
          const double r = 0.5 * (a + b);
          if (std::abs(h(r)) < row.min_abs) {
            row.min_abs = std::abs(h(r));
            row.at_t = sgn * r;
          }
        }
        if (std::abs(v) < best_v) {
          best_v = std::abs(v);
          best = static_cast<std::size_t>(k);
        }
        prev_s = s;
        prev_v = v;
      }
      // Golden-section refinement around the best sample.
      double a = ss[best == 0 ? 0 : best - 1];
      double b = ss[std::min<std::size_t>(best + 1, kSamples)];
      const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
      double c = b - gr * (b - a), e = a + gr * (b - a);
      for (int it = 0; it < 100; ++it) {
        if (std::abs(h(c)) < std::abs(h(e))) b = e;
        else a = c;
        c = b - gr * (b - a);
        e = a + gr * (b - a);
      }
      const double s = 0.5 * (a + b);
      const double cand[] = {ss[best], s};
      for (double cs : cand) {
        if (std::abs(h(cs)) < row.min_abs) {
          row.min_abs = std::abs(h(cs));
          row.at_t = sgn * cs;
        }
      }
    }
    row.ratio = row.min_abs / std::ldexp(1.0, -d * j);
    scan.rows.push_back(row);
  }
  return scan;
}

std::vector<PVResult> bht_on_grid(const Polynomial& p, const Polynomial& q, const TestFunction& f,
                                  const TestFunction& g, const std::vector<double>& xs,
                                  double eps, double R, const PVOptions& opt) {
  std::vector<PVResult> out(xs.size());
  parallel_for(xs.size(), [&](std::size_t i) { out[i] = bht_truncated(p, q, f, g, xs[i], eps, R, opt); });
  return out;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  if (n > 1) v[n - 1] = hi;
  return v;
}

}  // namespace bht
