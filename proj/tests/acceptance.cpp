// Acceptance runner: one pass/fail line per criterion.
//   bht_acceptance               run all criteria
//   bht_acceptance --criterion N run one criterion
// Exit code is 0 only if every selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "algebra_catalog.hpp"
#include "bht/errors.hpp"
#include "bht/kernels.hpp"
#include "bht/normlab.hpp"
#include "bht/oscsym.hpp"
#include "bht/polynomial.hpp"
#include "bht/pvquad.hpp"
#include "bht/testfuncs.hpp"
#include "oracles.hpp"

using namespace bht;
using cplx = std::complex<double>;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<Outcome()> run;
};

Polynomial P(const char* s) { return parse_polynomial(s); }

std::vector<int> range(int a, int b) {
  std::vector<int> v;
  for (int k = a; k <= b; ++k) v.push_back(k);
  return v;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Outcome kernel_identities() {
  const auto ts = log_samples(std::ldexp(1.0, -20), std::ldexp(1.0, 20), 10000);
  std::vector<double> signed_ts;
  for (std::size_t i = 0; i < ts.size(); ++i) signed_ts.push_back(i % 2 ? -ts[i] : ts[i]);
  const double r_rho = verify_partition(make_rho(), signed_ts).max_residual;
  const double r_bump = verify_partition(make_unit_bump(), signed_ts).max_residual;
  const double r_phi = verify_partition(make_freq_cutoff(), signed_ts).max_residual;
  const double worst = std::max({r_rho, r_bump, r_phi});
  return {worst <= 1e-12, "rho " + fmt("%.2e", r_rho) + ", rho0 " + fmt("%.2e", r_bump) + ", Phi-hat " +
                              fmt("%.2e", r_phi) + " (limit 1e-12)"};
}

Outcome correlation_degrees() {
  int mismatches = 0;
  std::string first;
  const auto pairs = catalog::correlation_pairs();
  for (const auto& pair : pairs) {
    const auto detail = correlation_degree_detail(pair.p, pair.q);
    const int observed = oracle::max_root_multiplicity((pair.p.derivative() - pair.q.derivative()).to_doubles());
    if (detail.degree != std::max(observed, 1) || detail.by_convention != (observed == 0)) {
      ++mismatches;
      if (first.empty()) first = pair.label;
    }
  }
  const auto adm = admissibility(P("t^6"), P("3t^4 - 3t^2"));
  const bool paper = adm.admissible && adm.correlation_degree == 2 && adm.r_threshold == Rational(2, 3);
  std::string detail = std::to_string(pairs.size()) + " pairs, " + std::to_string(mismatches) +
                       " mismatches; (t^6, 3t^4-3t^2): d=" + std::to_string(adm.correlation_degree) +
                       ", threshold " + to_string(adm.r_threshold);
  if (!first.empty()) detail += "; first mismatch " + first;
  return {mismatches == 0 && paper && pairs.size() == 20, detail};
}

Outcome zero_operator_counterexample() {
  const auto probes = Catalog::builtin().all();
  const auto report = counterexample_suite(linspace(-4.0, 4.0, 257), probes);
  std::ostringstream d;
  d << probes.size() << " probes;";
  for (const auto& c : report.cases)
    d << " " << c.label << (c.expect_zero ? " max|B|/(|f||g|)=" : " max|B|=")
      << fmt("%.2e", c.expect_zero ? c.max_normalized : c.max_abs) << (c.passed ? "" : " [fail]") << ";";
  d << " d=" << report.correlation_degree;
  return {report.passed && probes.size() == 12, d.str()};
}

Outcome linear_cross_check() {
  const auto c = Catalog::builtin();
  const std::vector<std::pair<std::string, std::string>> pairs{{"g1", "g1"}, {"g1", "g10"}, {"g10", "g2"}, {"g2", "g1"}};
  const auto xs = linspace(-2.0, 2.0, 9);
  double worst = 0.0;
  for (const auto& [a, b] : pairs) {
    const auto& f = c.get(a);
    const auto& g = c.get(b);
    const auto direct = bht_on_grid(P("t"), P("2t"), f, g, xs, 1e-9, 1e3);
    for (std::size_t i = 0; i < xs.size(); ++i)
      worst = std::max(worst, std::abs(direct[i].value - linear_multiplier_oracle(1.0, 2.0, f, g, xs[i])));
  }
  return {worst <= 1e-6, "4 pairs x 9 points, max |truncated - oracle| = " + fmt("%.2e", worst) + " (limit 1e-6)"};
}

Outcome decomposition_consistency() {
  const auto c = Catalog::builtin();
  const auto p = P("t"), q = P("t^2");
  const std::vector<std::pair<std::string, std::string>> pairs{{"g1", "g1"}, {"g1", "g2"}, {"g10", "g1"}, {"g2", "g10"}};
  const std::vector<double> xs{-0.75, 0.0, 0.6};
  double worst_sum = 0.0;
  for (const auto& [a, b] : pairs) {
    const auto& f = c.get(a);
    const auto& g = c.get(b);
    std::vector<cplx> acc(xs.size());
    for (int j = -5; j <= 20; ++j) {
      const auto piece = tj(p, q, f, g, j, xs);
      for (std::size_t i = 0; i < xs.size(); ++i) acc[i] += piece.values[i];
    }
    const auto direct = bht_on_grid(p, q, f, g, xs, std::ldexp(1.0, -21), 64.0);
    for (std::size_t i = 0; i < xs.size(); ++i) worst_sum = std::max(worst_sum, std::abs(acc[i] - direct[i].value));
  }
  double worst_paths = 0.0;
  for (int j : {0, 3}) {
    const auto a = tj(p, q, c.get("g1"), c.get("g1"), j, xs);
    const auto b = tj_frequency(p, q, c.get("g1"), c.get("g1"), j, xs);
    for (std::size_t i = 0; i < xs.size(); ++i) worst_paths = std::max(worst_paths, std::abs(a.values[i] - b.values[i]));
  }
  return {worst_sum <= 1e-5 && worst_paths <= 1e-6,
          "max |sum T_j - truncated| = " + fmt("%.2e", worst_sum) + " (limit 1e-5); max |time - frequency| = " +
              fmt("%.2e", worst_paths) + " (limit 1e-6)"};
}

Outcome stationary_phase() {
  const PhaseModel model(P("t"), P("t^2"), 0);
  const auto rows = stationary_phase_check(model, 2.0, -1.0, range(6, 14));
  double lo = INFINITY, hi = 0.0;
  for (const auto& r : rows) {
    lo = std::min(lo, r.normalized_magnitude);
    hi = std::max(hi, r.normalized_magnitude);
  }
  const bool stationary_ok = hi / lo <= 2.0;

  const bool non_stationary = critical_point(model, 1.0, 1.0).non_stationary();
  const auto mags = symbol_magnitudes(model, 1.0, 1.0, range(6, 14));
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : mags) pts.push_back({double(r.m), r.magnitude});
  const auto fit = fit_decay_exponent(pts);
  const bool decay_ok = non_stationary && fit.fitted_exponent > 2.0;
  return {stationary_ok && decay_ok, "stationary max/min = " + fmt("%.4f", hi / lo) +
                                         " (limit 2); non-stationary decay slope = " +
                                         fmt("%.3f", fit.fitted_exponent) + " bits per m (limit > 2)"};
}

Outcome jacobian_bound() {
  const auto scan = jacobian_scan(P("t^6"), P("3t^4 - 3t^2"), 1, range(4, 12));
  double lo = INFINITY, hi = 0.0;
  for (const auto& r : scan.rows) {
    lo = std::min(lo, r.ratio);
    hi = std::max(hi, r.ratio);
  }
  const bool ok = scan.multiplicity == 2 && lo >= 6.0 && hi <= 96.0;
  return {ok, "d = " + std::to_string(scan.multiplicity) + ", ratio range [" + fmt("%.6f", lo) + ", " +
                  fmt("%.6f", hi) + "] against window [6, 96]"};
}

Outcome off_diagonal_decay() {
  const auto p = P("t"), q = P("t^2");
  auto sup = [&](int m, int n) { return symbol_decay_scan(p, q, 2, {m}, {n}, 16).front().sup_abs; };
  double worst = 0.0;
  std::string where;
  for (int k = 8; k <= 12; ++k) {
    const double diag = sup(k, k);
    for (auto [m, n] : {std::pair{k, k - 8}, std::pair{k - 8, k}}) {
      const double r = sup(m, n) / diag;
      if (r >= worst) {
        worst = r;
        where = "(" + std::to_string(m) + "," + std::to_string(n) + ")";
      }
    }
  }
  return {worst <= 1e-3, "max off-diagonal/diagonal ratio = " + fmt("%.2e", worst) + " at " + where + " (limit 1e-3)"};
}

Outcome empirical_decay() {
  const auto p = P("t"), q = P("t^2");
  const auto fit = m_decay_scan(p, q, range(9, 14), range(2, 9), default_band_probes());
  const auto planted = m_decay_scan(p, q, range(9, 14), range(2, 9), default_band_probes(), planted_decay_operator(0.5));
  const bool ok = fit.fitted_exponent > 0.0 && std::abs(planted.fitted_exponent - 0.5) <= 0.02;
  return {ok, "fitted exponent = " + fmt("%.4f", fit.fitted_exponent) + " (residual " + fmt("%.3f", fit.residual) +
                  "); planted 0.5 recovered as " + fmt("%.4f", planted.fitted_exponent)};
}

Outcome mixed_derivative() {
  const PhaseModel model(P("t"), P("t^2"), 6);
  const auto grid = band_samples(16);
  bool ok = true;
  std::string detail;
  for (double tau : {0.02, 0.05, 0.1}) {
    const auto r = mixed_derivative_check(model, tau, grid, grid);
    ok = ok && !r.degenerate && r.evaluated > 0 && r.min_normalized >= 0.05;
    detail += "tau " + fmt("%.2f", tau) + ": min " + fmt("%.4f", r.min_normalized) + "; ";
  }
  return {ok, detail + "limit 0.05"};
}

Outcome maximal_sanity() {
  const auto c = Catalog::builtin();
  const auto grid = default_eps_grid();
  std::size_t violations = 0, checked = 0;
  for (const auto& [a, b] : std::vector<std::pair<std::string, std::string>>{{"g1", "g2"}, {"g5", "g10"}, {"g9", "g3"}}) {
    for (double x : linspace(-2.0, 2.0, 5)) {
      const auto r = maximal(P("t"), P("t^2"), c.get(a), c.get(b), x, grid);
      for (std::size_t i = 0; i < r.eps.size(); ++i) {
        ++checked;
        if (!(r.averages[i] >= 0.0) || !(r.signed_averages[i] >= 0.0) || r.signed_averages[i] > r.averages[i]) ++violations;
      }
    }
  }
  const auto wide = TestFunction::gaussian(100.0);
  const double near_one = maximal(P("t"), P("t^2"), wide, wide, 0.0, grid).value;

  const auto g = TestFunction::gaussian();
  const double coarse = maximal(P("t"), P("t^2"), g, g, 0.0, grid).value;
  std::vector<double> fine;
  for (int k = -400; k <= 120; ++k) fine.push_back(std::exp2(0.05 * k));
  const double refined = maximal(P("t"), P("t^2"), g, g, 0.0, fine).value;

  const bool ok = violations == 0 && std::abs(near_one - 1.0) <= 1e-3 && std::abs(coarse - refined) <= 1e-4;
  return {ok, std::to_string(checked) + " averages, " + std::to_string(violations) + " violations; wide Gaussian " +
                  fmt("%.6f", near_one) + "; refinement change " + fmt("%.2e", std::abs(coarse - refined))};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "kernel identities", 5, kernel_identities},
      {2, "correlation-degree exactness", 1, correlation_degrees},
      {3, "zero-operator counterexample", 120, zero_operator_counterexample},
      {4, "linear cross-check", 300, linear_cross_check},
      {5, "decomposition consistency", 600, decomposition_consistency},
      {6, "stationary phase", 120, stationary_phase},
      {7, "jacobian bound", 1, jacobian_bound},
      {8, "off-diagonal symbol decay", 600, off_diagonal_decay},
      {9, "empirical m-decay", 1800, empirical_decay},
      {10, "mixed derivative", 60, mixed_derivative},
      {11, "maximal function sanity", 60, maximal_sanity},
  };

  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--criterion" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
      return 2;
    }
  }
  if (only < 0 || only > static_cast<int>(all.size())) {
    std::fprintf(stderr, "unknown criterion %d\n", only);
    return 2;
  }

  bool all_passed = true;
  for (const auto& c : all) {
    if (only && c.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = elapsed < c.budget_seconds;
    const bool passed = out.passed && in_time;
    all_passed = all_passed && passed;
    std::printf("criterion %2d [%s] %s: %s; %.2f s of %.0f s%s\n", c.id, passed ? "PASS" : "FAIL", c.name.c_str(),
                out.detail.c_str(), elapsed, c.budget_seconds, in_time ? "" : " (over budget)");
    std::fflush(stdout);
  }
  return all_passed ? 0 : 1;
}
