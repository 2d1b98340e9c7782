#include "bht/oscsym.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bht/errors.hpp"
#include "bht/kernels.hpp"
#include "bht/parallel.hpp"
#include "bht/quadrature.hpp"

namespace bht {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Rational pow2(int e) {
  Rational r(1);
  const Rational two(2);
  const Rational half(1, 2);
  for (int i = 0; i < std::abs(e); ++i) r *= (e > 0 ? two : half);
  return r;
}

std::complex<double> unit_phase(double cycles) {
  // Reduce to the fractional part first so large phases keep their accuracy.
  const double frac = cycles - std::round(cycles);
  const double ang = -kTwoPi * frac;
  return {std::cos(ang), std::sin(ang)};
}

// int_{2^{-j-1} < |t| < 2^{-j+1}} 2^j rho(2^j t) e^{-2 pi i R(t)} dt, paired over +-t.
SymbolSample scaled_kernel_integral(const RealPoly& phase, int j, const SymbolOptions& opt) {
  static const DyadicKernel rho = make_rho();
  const double lo = std::ldexp(1.0, -j - 1);
  const double hi = std::ldexp(1.0, -j + 1);
  const RealPoly dphase = phase.derivative();
  auto freq = [&](double a, double b) {
    const double pos = dphase.max_abs(a, b);
    const double neg = dphase.max_abs(-b, -a);
    // The kernel itself varies on the scale of its support.
    return std::max(pos, neg) + 2.0 / (hi - lo);
  };
  auto none = [](double, double) { return false; };
  const auto panels = quad::oscillation_panels(lo, hi, freq, none, opt.max_panels);
  auto integrand = [&](double t) -> std::complex<double> {
    const double k = rho.scaled(j, t);
    if (k == 0.0) return {};
    return k * (unit_phase(phase(t)) - unit_phase(phase(-t)));
  };
  quad::Options qo;
  qo.abs_tol = opt.abs_tol;
  qo.panel_tol = std::numeric_limits<double>::infinity();
  qo.max_panels = opt.max_panels;
  const auto est = quad::integrate_panels<std::complex<double>>(integrand, panels, qo);
  SymbolSample s;
  s.value = est.value;
  s.abs_error = est.error;
  s.j = j;
  return s;
}

RealPoly combine(const Polynomial& p, const Polynomial& q, double xi, double eta) {
  const int deg = std::max(p.degree(), q.degree());
  std::vector<double> c(static_cast<std::size_t>(std::max(deg + 1, 0)), 0.0);
  for (int k = 0; k <= deg; ++k) {
    c[static_cast<std::size_t>(k)] = xi * to_double(p.coeff(k)) + eta * to_double(q.coeff(k));
  }
  return RealPoly(std::move(c));
}

double wrap_angle(double a) {
  a = std::remainder(a, kTwoPi);
  if (a <= -std::numbers::pi) a += kTwoPi;
  return a;
}

bool in_domain(double t) {
  // rho vanishes to infinite order at |t| = 1/2 and 2, so roots there are
  // not stationary points of the integral.
  const double a = std::abs(t);
  return a > 0.5 && a < 2.0;
}

// Safeguarded Newton on a bracket [lo, hi] with a sign change of f.
double polish_root(const RealPoly& f, double lo, double hi) {
  const RealPoly df = f.derivative();
  double flo = f(lo);
  if (flo == 0.0) return lo;
  if (f(hi) == 0.0) return hi;
  double t = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double ft = f(t);
    if (ft == 0.0) return t;
    if ((ft < 0) == (flo < 0)) {
      lo = t;
      flo = ft;
    } else {
      hi = t;
    }
    const double d = df(t);
    double next = d != 0.0 ? t - ft / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 4 * std::numeric_limits<double>::epsilon() * std::abs(t) ||
        hi - lo <= 4 * std::numeric_limits<double>::epsilon() * std::abs(t)) {
      return next;
    }
    t = next;
  }
  return t;
}

// Isolate the distinct real roots of a square-free polynomial in (lo, hi].
void isolate(const SturmSequence& sturm, const Polynomial& sqf, const Rational& lo,
             const Rational& hi, int count, std::vector<std::pair<Rational, Rational>>& out) {
  if (count <= 0) return;
  const Rational width_limit(1, 1 << 20);
  // A root sitting on the excluded endpoint lo would capture the polish, so
  // such brackets are always split further.
  const Rational fl = sqf(lo);
  if (count == 1 && fl != 0 && (hi - lo) <= width_limit * (1 + boost::multiprecision::abs(hi))) {
    out.push_back({lo, hi});
    return;
  }
  if (count == 1 && fl != 0) {
    // A single root: a sign change (or a root at hi) gives a valid bracket.
    const Rational fh = sqf(hi);
    if (fh == 0 || (fl > 0) != (fh > 0)) {
      out.push_back({lo, hi});
      return;
    }
  }
  const Rational mid = (lo + hi) / 2;
  const int left = sturm.count_roots(lo, mid);
  isolate(sturm, sqf, lo, mid, left, out);
  isolate(sturm, sqf, mid, hi, count - left, out);
}

}  // namespace

PhaseModel::PhaseModel(const Polynomial& p, const Polynomial& q, int scale) : j(scale) {
  const auto np = normalize_trailing(p);
  const auto nq = normalize_trailing(q);
  a = np.trailing_degree;
  b = nq.trailing_degree;
  p_scale = np.scale;
  q_scale = nq.scale;
  auto rescale = [&](const Polynomial& normalized, int deg) {
    std::vector<Rational> c(normalized.coeffs().size());
    for (int k = deg + 1; k <= normalized.degree(); ++k) {
      c[static_cast<std::size_t>(k)] = normalized.coeff(k) * pow2((deg - k) * scale);
    }
    return Polynomial(std::move(c));
  };
  eps_p = rescale(np.normalized, a);
  eps_q = rescale(nq.normalized, b);
  p_rescaled = Polynomial::monomial(Rational(1), a) + eps_p;
  q_rescaled = Polynomial::monomial(Rational(1), b) + eps_q;
}

RealPoly PhaseModel::phase(double xi, double eta) const {
  return combine(p_rescaled, q_rescaled, xi, eta);
}

SymbolSample kernel_phase_integral(const RealPoly& phase, const SymbolOptions& opt) {
  return scaled_kernel_integral(phase, 0, opt);
}

SymbolSample mj_rescaled(const PhaseModel& model, double xi, double eta, const SymbolOptions& opt) {
  const double xs = xi * to_double(model.p_scale) * std::ldexp(1.0, -model.a * model.j);
  const double es = eta * to_double(model.q_scale) * std::ldexp(1.0, -model.b * model.j);
  SymbolSample s = kernel_phase_integral(model.phase(xs, es), opt);
  s.xi = xi;
  s.eta = eta;
  s.j = model.j;
  return s;
}

SymbolSample mj(const Polynomial& p, const Polynomial& q, int j, double xi, double eta,
                bool check_rescaled, const SymbolOptions& opt) {
  SymbolSample s = scaled_kernel_integral(combine(p, q, xi, eta), j, opt);
  s.xi = xi;
  s.eta = eta;
  if (check_rescaled) {
    const SymbolSample r = mj_rescaled(PhaseModel(p, q, j), xi, eta, opt);
    const double diff = std::abs(r.value - s.value);
    if (diff > 1e-9 + r.abs_error + s.abs_error) {
      throw Error("m_j direct and rescaled forms disagree by " + std::to_string(diff));
    }
  }
  return s;
}

SymbolSample rescaled_symbol(const PhaseModel& model, int m, double xi, double eta,
                             const SymbolOptions& opt) {
  auto in_band = [](double v) { return std::abs(v) >= 0.5 && std::abs(v) <= 2.0; };
  if (!in_band(xi) || !in_band(eta)) {
    throw PreconditionError("rescaled symbol needs 1/2 <= |xi|, |eta| <= 2");
  }
  const double lam = std::ldexp(1.0, m);
  SymbolSample s = kernel_phase_integral(model.phase(lam * xi, lam * eta), opt);
  s.xi = xi;
  s.eta = eta;
  s.j = model.j;
  s.m = m;
  s.n = m;
  return s;
}

SymbolSample rescaled_symbol(const Polynomial& p, const Polynomial& q, int m, double xi,
                             double eta, const SymbolOptions& opt) {
  return rescaled_symbol(PhaseModel(p, q, 0), m, xi, eta, opt);
}

SymbolSample band_symbol(const PhaseModel& model, int m, int n, double xi, double eta,
                         const SymbolOptions& opt) {
  static const FrequencyCutoff cutoff{CutoffGrid{}};
  const double u = std::ldexp(xi, -(model.a * model.j + m));
  const double v = std::ldexp(eta, -(model.b * model.j + n));
  const double w = cutoff.hat(u) * cutoff.hat(v);
  SymbolSample s;
  s.xi = xi;
  s.eta = eta;
  s.j = model.j;
  s.m = m;
  s.n = n;
  if (w == 0.0) return s;
  const double xs = std::ldexp(u, m) * to_double(model.p_scale);
  const double es = std::ldexp(v, n) * to_double(model.q_scale);
  const SymbolSample base = kernel_phase_integral(model.phase(xs, es), opt);
  s.value = w * base.value;
  s.abs_error = w * base.abs_error;
  return s;
}

std::vector<double> monomial_critical_points(int a, int b, double xi, double eta) {
  const int k = b - a;
  if (k == 0 || eta == 0.0) return {};
  const double r = -static_cast<double>(a) * xi / (static_cast<double>(b) * eta);
  if (r == 0.0) return {};
  if (k % 2 != 0) {
    const double root = std::pow(std::abs(r), 1.0 / k);
    return {r > 0 ? root : -root};
  }
  if (r < 0) return {};
  const double root = std::pow(r, 1.0 / k);
  return {-root, root};
}

const PhaseRecord& CriticalPoints::primary() const {
  if (records.empty()) throw PreconditionError("non-stationary: no interior critical point");
  const PhaseRecord* best = &records.front();
  for (const auto& r : records) {
    if (!std::isnan(r.t1) && std::abs(r.t_crit - r.t1) < std::abs(best->t_crit - best->t1)) {
      best = &r;
    }
  }
  return *best;
}

CriticalPoints critical_point(const PhaseModel& model, double xi, double eta) {
  if (xi == 0.0 && eta == 0.0) throw PreconditionError("critical point needs (xi, eta) != 0");
  const Rational rx = rational_from_double(xi);
  const Rational re = rational_from_double(eta);
  const Polynomial phase = model.p_rescaled * rx + model.q_rescaled * re;
  const Polynomial dphase = phase.derivative();
  CriticalPoints out;
  if (dphase.is_zero()) throw PreconditionError("phase is constant; every point is critical");
  if (dphase.degree() == 0) return out;
  Polynomial sqf = make_monic(dphase);
  const Polynomial g = gcd(dphase, dphase.derivative());
  if (g.degree() > 0) sqf = make_monic(divmod(dphase, g).first);

  // Cauchy bound on the roots.
  Rational bound(1);
  for (const auto& c : sqf.coeffs()) bound = std::max(bound, Rational(1 + boost::multiprecision::abs(c)));
  SturmSequence sturm(sqf);
  std::vector<std::pair<Rational, Rational>> brackets;
  isolate(sturm, sqf, -bound, bound, sturm.count_roots(-bound, bound), brackets);

  const RealPoly f(phase);
  const RealPoly df = f.derivative();
  const RealPoly d2f = df.derivative();
  const RealPoly sq(sqf);
  const auto t1s = monomial_critical_points(model.a, model.b, xi, eta);
  for (const auto& [lo, hi] : brackets) {
    double t;
    if (sqf(hi) == 0) {
      t = to_double(hi);
    } else {
      t = polish_root(sq, to_double(lo), to_double(hi));
    }
    if (t == 0.0) continue;
    if (!in_domain(t)) {
      out.outside.push_back(t);
      continue;
    }
    PhaseRecord rec;
    rec.t_crit = t;
    rec.phi = f(t);
    rec.phi_second = d2f(t);
    rec.residual = std::abs(df(t));
    double scale = 0.0;
    const auto& c = df.coeffs();
    for (std::size_t k = 0; k < c.size(); ++k) scale += std::abs(c[k]) * std::pow(std::abs(t), k);
    if (rec.residual > 1e-12 * std::max(1.0, scale)) {
      throw Error("critical point polish did not converge: |phi'| = " + std::to_string(rec.residual));
    }
    rec.t1 = std::numeric_limits<double>::quiet_NaN();
    rec.phi_star = std::numeric_limits<double>::quiet_NaN();
    for (double t1 : t1s) {
      if (std::isnan(rec.t1) || std::abs(t1 - t) < std::abs(rec.t1 - t)) rec.t1 = t1;
    }
    if (!std::isnan(rec.t1)) {
      rec.phi_star = xi * std::pow(rec.t1, model.a) + eta * std::pow(rec.t1, model.b);
      rec.err_term = rec.phi - rec.phi_star;
    } else {
      rec.err_term = std::numeric_limits<double>::quiet_NaN();
    }
    out.records.push_back(rec);
  }
  std::sort(out.records.begin(), out.records.end(),
            [](const PhaseRecord& x, const PhaseRecord& y) { return x.t_crit < y.t_crit; });
  std::sort(out.outside.begin(), out.outside.end());
  return out;
}

CriticalPoints critical_point(const Polynomial& p, const Polynomial& q, double xi, double eta,
                              int j) {
  return critical_point(PhaseModel(p, q, j), xi, eta);
}

std::vector<StationaryRow> stationary_phase_check(const PhaseModel& model, double xi, double eta,
                                                  const std::vector<int>& m_range,
                                                  const SymbolOptions& opt) {
  const auto cps = critical_point(model, xi, eta);
  if (cps.non_stationary()) {
    throw PreconditionError("non-stationary: no critical point with 1/2 <= |t| <= 2");
  }
  const PhaseRecord& rec = cps.primary();
  const RealPoly f = model.phase(xi, eta);
  double scale = 0.0;
  for (double c : f.coeffs()) scale = std::max(scale, std::abs(c));
  if (std::abs(rec.phi_second) <= 1e-8 * std::max(1.0, scale)) {
    throw Error("degenerate critical point: phi''(t0) = " + std::to_string(rec.phi_second));
  }
  std::vector<StationaryRow> rows(m_range.size());
  parallel_for(m_range.size(), [&](std::size_t i) {
    const int m = m_range[i];
    const SymbolSample s = rescaled_symbol(model, m, xi, eta, opt);
    StationaryRow r;
    r.m = m;
    r.normalized_magnitude = std::abs(s.value) * std::sqrt(std::ldexp(1.0, m));
    const double cycles = std::ldexp(rec.phi, m);
    const double frac = cycles - std::round(cycles);
    r.phase_residual = wrap_angle(std::arg(s.value) + kTwoPi * frac);
    r.abs_error = s.abs_error;
    rows[i] = r;
  });
  return rows;
}

std::vector<DecayRow> symbol_magnitudes(const PhaseModel& model, double xi, double eta,
                                        const std::vector<int>& m_range,
                                        const SymbolOptions& opt) {
  std::vector<DecayRow> rows(m_range.size());
  parallel_for(m_range.size(), [&](std::size_t i) {
    const SymbolSample s = rescaled_symbol(model, m_range[i], xi, eta, opt);
    rows[i] = {m_range[i], std::abs(s.value), s.abs_error};
  });
  return rows;
}

std::vector<double> band_samples(int samples) {
  if (samples < 2 || samples % 2 != 0) throw PreconditionError("band samples must be even and >= 2");
  const int half = samples / 2;
  std::vector<double> pos(static_cast<std::size_t>(half));
  for (int i = 0; i < half; ++i) {
    pos[static_cast<std::size_t>(i)] = std::exp2(-1.0 + (i + 0.5) * 2.0 / half);
  }
  std::vector<double> out;
  for (auto it = pos.rbegin(); it != pos.rend(); ++it) out.push_back(-*it);
  out.insert(out.end(), pos.begin(), pos.end());
  return out;
}

std::vector<SurfaceRow> symbol_decay_scan(const Polynomial& p, const Polynomial& q, int j,
                                          const std::vector<int>& m_values,
                                          const std::vector<int>& n_values, int samples,
                                          const SymbolOptions& opt) {
  const PhaseModel model(p, q, j);
  const auto band = band_samples(samples);
  std::vector<double> us;
  for (double u : band) {
    if (u > 0) us.push_back(u);
  }
  struct Task {
    std::size_t cell;
    double u, v;
  };
  std::vector<Task> tasks;
  const std::size_t cells = m_values.size() * n_values.size();
  for (std::size_t c = 0; c < cells; ++c) {
    for (double u : us) {
      for (double v : band) tasks.push_back({c, u, v});
    }
  }
  std::vector<SymbolSample> results(tasks.size());
  parallel_for(tasks.size(), [&](std::size_t i) {
    const auto& t = tasks[i];
    const int m = m_values[t.cell / n_values.size()];
    const int n = n_values[t.cell % n_values.size()];
    const double xi = std::ldexp(t.u, model.a * j + m);
    const double eta = std::ldexp(t.v, model.b * j + n);
    results[i] = band_symbol(model, m, n, xi, eta, opt);
  });
  std::vector<SurfaceRow> rows(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    rows[c].m = m_values[c / n_values.size()];
    rows[c].n = n_values[c % n_values.size()];
    rows[c].sup_abs = -1.0;
  }
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    auto& row = rows[tasks[i].cell];
    const double mag = std::abs(results[i].value);
    if (mag > row.sup_abs) {
      row.sup_abs = mag;
      row.arg_xi = results[i].xi;
      row.arg_eta = results[i].eta;
      row.abs_error = results[i].abs_error;
    }
  }
  return rows;
}

std::optional<double> critical_value(const PhaseModel& model, double xi, double eta) {
  const auto cps = critical_point(model, xi, eta);
  if (cps.non_stationary()) return std::nullopt;
  return cps.primary().phi;
}

namespace {

// Newton continuation from a nearby critical point; used for finite-difference
// stencils where the exact isolation would be wasted work.
std::optional<double> critical_value_near(const PhaseModel& model, double xi, double eta,
                                          double t_start) {
  const RealPoly f = model.phase(xi, eta);
  const RealPoly df = f.derivative();
  const RealPoly d2f = df.derivative();
  double t = t_start;
  for (int it = 0; it < 60; ++it) {
    const double d2 = d2f(t);
    if (d2 == 0.0) return std::nullopt;
    const double step = df(t) / d2;
    t -= step;
    if (std::abs(step) <= 1e-16 * std::abs(t)) break;
  }
  if (!in_domain(t) || std::abs(t - t_start) > 0.1) return std::nullopt;
  return f(t);
}

}  // namespace

MixedDerivativeReport mixed_derivative_check(const PhaseModel& model, double tau,
                                             const std::vector<double>& xis,
                                             const std::vector<double>& etas, double step) {
  MixedDerivativeReport rep;
  if (tau == 0.0) {
    rep.degenerate = true;
    rep.note = "degenerate, skipped: tau = 0 makes Q_tau identically zero";
    return rep;
  }
  const double shift = tau * std::ldexp(1.0, -(model.b - model.a) * model.j);
  auto in_band = [&](double v) {
    return std::abs(v) - step >= 0.5 && std::abs(v) + step <= 2.0;
  };
  rep.min_normalized = std::numeric_limits<double>::infinity();
  for (double xi : xis) {
    for (double eta : etas) {
      if (!in_band(xi) || !in_band(eta) || !in_band(xi - tau) || !in_band(eta + shift)) {
        ++rep.skipped;
        continue;
      }
      const auto c0 = critical_point(model, xi, eta);
      const auto c1 = critical_point(model, xi - tau, eta + shift);
      if (c0.non_stationary() || c1.non_stationary()) {
        ++rep.skipped;
        continue;
      }
      const double t0 = c0.primary().t_crit;
      const double t1 = c1.primary().t_crit;
      bool ok = true;
      auto q_tau = [&](double x, double y) {
        const auto a = critical_value_near(model, x, y, t0);
        const auto b = critical_value_near(model, x - tau, y + shift, t1);
        if (!a || !b) {
          ok = false;
          return 0.0;
        }
        return *a - *b;
      };
      const double d = mixed_difference(q_tau, xi, eta, step);
      if (!ok) {
        ++rep.skipped;
        continue;
      }
      ++rep.evaluated;
      const double v = std::abs(d) / std::abs(tau);
      if (v < rep.min_normalized) {
        rep.min_normalized = v;
        rep.at_xi = xi;
        rep.at_eta = eta;
      }
    }
  }
  if (rep.evaluated == 0) {
    rep.min_normalized = std::numeric_limits<double>::quiet_NaN();
    rep.note = "no grid point admits interior critical points for the whole stencil";
  }
  return rep;
}

std::optional<BetaValue> beta_function(int a, int b, const RealPoly& eps, double z) {
  if (b <= a) throw PreconditionError("beta needs b > a");
  const double e = static_cast<double>(b) / (b - a);
  const RealPoly deps = eps.derivative();
  auto g = [&](double x) { return e * std::pow(x, e - 1.0) + deps(x) + z; };
  const int n = 1024;
  double lo = 0.5;
  double glo = g(lo);
  for (int i = 1; i <= n; ++i) {
    double hi = 0.5 + 1.5 * i / n;
    const double ghi = g(hi);
    if (glo == 0.0) hi = lo;
    if (glo == 0.0 || ghi == 0.0 || (glo < 0) != (ghi < 0)) {
      if (ghi == 0.0) lo = hi;
      for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if ((gm < 0) == (glo < 0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      const double zeta = 0.5 * (lo + hi);
      return BetaValue{zeta, std::pow(zeta, e) + eps(zeta) + z * zeta};
    }
    lo = hi;
    glo = ghi;
  }
  return std::nullopt;
}

}  // namespace bht
