#include "bht/normlab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bht/oscsym.hpp"
#include "bht/parallel.hpp"
#include "bht/realpoly.hpp"

namespace bht {

namespace {

using cplx = std::complex<double>;

}  // namespace

ProbeOperator zero_operator() {
  return {"zero", [](const TestFunction&, const TestFunction&, const std::vector<double>& xs) {
            return std::vector<cplx>(xs.size());
          }};
}

ProbeOperator pointwise_product() {
  return {"product", [](const TestFunction& f, const TestFunction& g, const std::vector<double>& xs) {
            std::vector<cplx> out(xs.size());
            for (std::size_t i = 0; i < xs.size(); ++i) out[i] = f(xs[i]) * g(xs[i]);
            return out;
          }};
}

ProbeOperator tj_operator(const Polynomial& p, const Polynomial& q, int j, const PVOptions& opt) {
  return {"T_" + std::to_string(j) + "[" + p.to_string() + ", " + q.to_string() + "]",
          [p, q, j, opt](const TestFunction& f, const TestFunction& g, const std::vector<double>& xs) {
            return tj(p, q, f, g, j, xs, opt).values;
          }};
}

double trapezoid_lr_norm(const std::vector<cplx>& y, double dx, double r) {
  if (y.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double w = (i == 0 || i + 1 == y.size()) ? 0.5 : 1.0;
    acc += w * std::pow(std::abs(y[i]), r);
  }
  return std::pow(acc * dx, 1.0 / r);
}

ProbeResult ratio_probe(const ProbeOperator& op, const TestFunction& f, const TestFunction& g,
                        const Rational& p, const Rational& q, const Rational& r, const XGrid& grid) {
  if (p <= 0 || q <= 0 || r <= 0) throw PreconditionError("exponents must be positive");
  if (Rational(1) / r != Rational(1) / p + Rational(1) / q) {
    throw PreconditionError("exponents violate 1/r = 1/p + 1/q: p=" + to_string(p) +
                            " q=" + to_string(q) + " r=" + to_string(r));
  }
  if (grid.n < 2 || !(grid.x1 > grid.x0)) throw PreconditionError("ratio probe needs a nondegenerate grid");
  ProbeResult res;
  res.operator_label = op.label;
  res.f_label = f.label();
  res.g_label = g.label();
  res.p = p;
  res.q = q;
  res.r = r;
  res.grid = grid;
  const auto xs = grid.points();
  const auto y = op.eval(f, g, xs);
  double peak = 0.0;
  for (const auto& v : y) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) {
    res.boundary_ratio = std::max(std::abs(y.front()), std::abs(y.back())) / peak;
    if (res.boundary_ratio > 1e-6) {
      throw GridMassError("output of " + op.label + " reaches the grid boundary [" +
                              std::to_string(grid.x0) + ", " + std::to_string(grid.x1) +
                              "]: boundary/peak = " + std::to_string(res.boundary_ratio),
                          res.boundary_ratio);
    }
  }
  const double dx = (grid.x1 - grid.x0) / static_cast<double>(grid.n - 1);
  res.output_norm = trapezoid_lr_norm(y, dx, to_double(r));
  res.f_norm = lp_norm(f, to_double(p));
  res.g_norm = lp_norm(g, to_double(q));
  const double denom = res.f_norm * res.g_norm;
  res.ratio = denom > 0.0 ? res.output_norm / denom : 0.0;
  return res;
}

DecayFit fit_decay_exponent(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 4) throw PreconditionError("decay fit needs at least 4 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(points.size());
  DecayFit fit;
  for (const auto& [m, y] : points) {
    if (!(y > 0.0)) throw PreconditionError("decay fit needs positive ordinates, got " + std::to_string(y));
    const double ly = -std::log2(y);
    sx += m;
    sy += ly;
    sxx += m * m;
    sxy += m * ly;
    fit.abscissa.push_back(static_cast<int>(std::lround(m)));
    fit.ordinate.push_back(y);
  }
  const double det = n * sxx - sx * sx;
  if (det == 0.0) throw PreconditionError("decay fit needs distinct abscissae");
  fit.fitted_exponent = (n * sxy - sx * sy) / det;
  fit.intercept = (sy - fit.fitted_exponent * sx) / n;
  for (const auto& [m, y] : points) {
    fit.residual = std::max(fit.residual,
                            std::abs(-std::log2(y) - (fit.intercept + fit.fitted_exponent * m)));
  }
  return fit;
}

std::vector<BandProbe> default_band_probes() {
  return {{"band-a", 1.5, -0.75, 0.05},
          {"band-b", 1.6, 0.8, 0.05},
          {"band-c", 1.0, -0.6, 0.05},
          {"band-d", 1.8, -0.7, 0.05}};
}

BandProbePair make_band_probe(const Polynomial& p, const Polynomial& q, int j, int m,
                              const BandProbe& shape, std::size_t x_points) {
  if (!(shape.delta > 0.0)) throw PreconditionError("band probe needs delta > 0");
  const PhaseModel model(p, q, j);
  const double wf = std::ldexp(shape.u, model.a * j + m);
  const double wg = std::ldexp(shape.v, model.b * j + m);
  const double sf = 1.0 / (std::ldexp(shape.delta, model.a * j + m));
  const double sg = 1.0 / (std::ldexp(shape.delta, model.b * j + m));
  // Stationary point of -(wf P(t) + wg Q(t)) in rescaled s = 2^j t.
  double s = 1.0;
  const auto cp = critical_point(model, std::ldexp(shape.u, m) * to_double(model.p_scale),
                                 std::ldexp(shape.v, m) * to_double(model.q_scale));
  if (!cp.non_stationary()) s = cp.primary().t_crit;
  const double ts = std::ldexp(s, -j);
  const RealPoly P(p), Q(q);
  const RealPoly dP = P.derivative(), dQ = Q.derivative();
  BandProbePair pair;
  pair.t_stationary = ts;
  const double x0 = Q(ts);
  pair.f = TestFunction::gaussian(sf, x0 - P(ts), wf);
  pair.g = TestFunction::gaussian(sg, 0.0, wg);
  pair.f.set_label(shape.label + ":f[j=" + std::to_string(j) + ",m=" + std::to_string(m) + "]");
  pair.g.set_label(shape.label + ":g[j=" + std::to_string(j) + ",m=" + std::to_string(m) + "]");
  constexpr double kReach = 4.0;
  const double jac = std::abs(dQ(ts) - dP(ts));
  double dt = kReach * (sf + sg) / std::max(jac, std::numeric_limits<double>::min());
  dt = std::min(dt, std::ldexp(1.0, -j + 1));
  const double w = kReach * sg + std::max(std::abs(dQ(ts)), std::abs(dP(ts))) * dt;
  pair.grid = {x0 - w, x0 + w, x_points};
  return pair;
}

ScanOperatorFactory planted_decay_operator(double slope) {
  return [slope](int, int m) {
    return ProbeOperator{
        "planted 2^{-" + std::to_string(slope) + " m}",
        [slope, m](const TestFunction& f, const TestFunction& g, const std::vector<double>& xs) {
          const double c = 0.5 * (xs.front() + xs.back());
          const double s = (xs.back() - xs.front()) / 16.0;
          const double amp = std::exp2(-slope * m) * lp_norm(f, 2.0) * lp_norm(g, 2.0) / s;
          std::vector<cplx> out(xs.size());
          for (std::size_t i = 0; i < xs.size(); ++i) {
            const double z = (xs[i] - c) / s;
            out[i] = amp * std::exp(-std::numbers::pi * z * z);
          }
          return out;
        }};
  };
}

DecayFit m_decay_scan(const Polynomial& p, const Polynomial& q, const std::vector<int>& j_window,
                      const std::vector<int>& m_range, const std::vector<BandProbe>& probes,
                      std::size_t x_points, const PVOptions& opt) {
  return m_decay_scan(p, q, j_window, m_range, probes,
                      [&](int j, int) { return tj_operator(p, q, j, opt); }, x_points);
}

DecayFit m_decay_scan(const Polynomial& p, const Polynomial& q, const std::vector<int>& j_window,
                      const std::vector<int>& m_range, const std::vector<BandProbe>& probes,
                      const ScanOperatorFactory& op_for, std::size_t x_points) {
  if (probes.empty()) throw PreconditionError("decay scan needs at least one probe");
  if (j_window.empty()) throw PreconditionError("decay scan needs a nonempty j window");
  if (m_range.size() < 4) throw PreconditionError("decay scan needs at least 4 values of m");
  DecayFit partial;
  std::vector<std::pair<double, double>> sups;
  for (int m : m_range) {
    double sup = 0.0;
    for (int j : j_window) {
      for (const auto& shape : probes) {
        DecayPoint pt{m, j, shape.label, 0.0};
        try {
          const auto pair = make_band_probe(p, q, j, m, shape, x_points);
          const auto res = ratio_probe(op_for(j, m), pair.f, pair.g, 2, 2, 1, pair.grid);
          pt.ratio = res.ratio;
        } catch (const Error& e) {
          partial.abscissa.clear();
          for (const auto& [mm, y] : sups) {
            partial.abscissa.push_back(static_cast<int>(mm));
            partial.ordinate.push_back(y);
          }
          throw ScanAborted("decay scan aborted at m=" + std::to_string(m) + " j=" +
                                std::to_string(j) + " probe " + shape.label + ": " + e.what(),
                            partial);
        }
        partial.table.push_back(pt);
        sup = std::max(sup, pt.ratio);
      }
    }
    sups.push_back({static_cast<double>(m), sup});
  }
  DecayFit fit = fit_decay_exponent(sups);
  fit.table = std::move(partial.table);
  return fit;
}

namespace {

CounterexampleCase make_case(std::string label, Polynomial p, Polynomial q, bool expect_zero) {
  CounterexampleCase c;
  c.label = std::move(label);
  c.p = std::move(p);
  c.q = std::move(q);
  c.expect_zero = expect_zero;
  return c;
}

}  // namespace

CounterexampleReport counterexample_suite(const std::vector<double>& xs,
                                          const std::vector<TestFunction>& probes,
                                          const PVOptions& opt) {
  CounterexampleReport rep;
  const Polynomial paper_p = parse_polynomial("t^6");
  const Polynomial paper_q = parse_polynomial("3t^4-3t^2");
  const auto adm = admissibility(paper_p, paper_q);
  rep.correlation_degree = adm.correlation_degree;
  rep.threshold = adm.r_threshold;
  rep.degree_ok = adm.correlation_degree == 2 && adm.r_threshold == Rational(2, 3);
  rep.cases = {
      make_case("t^6, 3t^4-3t^2", paper_p, paper_q, true),
      make_case("t^2, t^4", parse_polynomial("t^2"), parse_polynomial("t^4"), true),
      make_case("t^4-t^2, 2t^6+t^2", parse_polynomial("t^4-t^2"), parse_polynomial("2t^6+t^2"), true),
      make_case("t, t^2 (control)", parse_polynomial("t"), parse_polynomial("t^2"), false),
  };
  for (auto& c : rep.cases) {
    for (std::size_t i = 0; i < probes.size(); ++i) {
      const TestFunction& f = probes[i];
      const TestFunction& g = probes[(i + 1) % probes.size()];
      const double scale = sup_norm(f) * sup_norm(g);
      const auto vals = bht_on_grid(c.p, c.q, f, g, xs, kSuiteEps, kSuiteR, opt);
      for (std::size_t k = 0; k < xs.size(); ++k) {
        const double a = std::abs(vals[k].value);
        ++c.evaluations;
        if (a > c.max_abs || (c.worst_probe.empty() && k == 0)) {
          c.max_abs = std::max(c.max_abs, a);
          c.max_normalized = std::max(c.max_normalized, scale > 0.0 ? a / scale : 0.0);
          c.worst_probe = f.label() + "/" + g.label();
          c.worst_x = xs[k];
        }
        if (scale > 0.0) c.max_normalized = std::max(c.max_normalized, a / scale);
      }
    }
    c.passed = c.expect_zero ? c.max_normalized <= 1e-8 : c.max_abs > 1e-3;
  }
  rep.passed = rep.degree_ok &&
               std::all_of(rep.cases.begin(), rep.cases.end(), [](const auto& c) { return c.passed; });
  return rep;
}

}  // namespace bht
