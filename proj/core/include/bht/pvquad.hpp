#pragma once

#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "bht/oscsym.hpp"
#include "bht/polynomial.hpp"
#include "bht/testfuncs.hpp"

namespace bht {

struct PVOptions {
  double panel_tol = 1e-10;
  double total_tol = 1e-8;
  std::size_t max_panels = 2'000'000;
};

/// Truncated principal value of the bilinear transform.
struct PVResult {
  std::complex<double> value;
  /// (eps, R) pairs in the order evaluated; the last one is reported.
  std::vector<std::pair<double, double>> epsilon_schedule;
  /// |ring over [eps, 2 eps]| + |ring over [R/2, R]|: the change from the
  /// previous truncation (2 eps, R/2).
  double convergence_estimate = 0.0;
  double quadrature_error = 0.0;
};

/// int_{eps < |t| < R} f(x - P(t)) g(x - Q(t)) dt / t. The +-t contributions
/// are paired so the integrand (F(t) - F(-t)) / t is smooth, and panels are
/// at most a quarter of the local oscillation wavelength.
PVResult bht_truncated(const Polynomial& p, const Polynomial& q, const TestFunction& f,
                       const TestFunction& g, double x, double eps, double R,
                       const PVOptions& opt = {});

/// p.v. int f(x - alpha t) g(x - beta t) dt / t through the Fourier side,
///   iint fhat(xi) ghat(eta) (-i pi sign(alpha xi + beta eta)) e^{2 pi i (xi + eta) x},
/// by nested adaptive quadrature. Independent of bht_truncated.
std::complex<double> linear_multiplier_oracle(double alpha, double beta, const TestFunction& f,
                                              const TestFunction& g, double x,
                                              double tol = 1e-10);

/// One dyadic scale of the decomposition evaluated on a list of x.
struct ScalePiece {
  int j = 0;
  std::vector<double> xs;
  std::vector<std::complex<double>> values;
  std::vector<double> errors;
};

/// T_j(f, g)(x) = int f(x - P(t)) g(x - Q(t)) 2^j rho(2^j t) dt in the time
/// domain.
ScalePiece tj(const Polynomial& p, const Polynomial& q, const TestFunction& f,
              const TestFunction& g, int j, const std::vector<double>& xs,
              const PVOptions& opt = {});

/// T_j through its symbol: iint fhat ghat e^{2 pi i (xi + eta) x} m_j(xi, eta).
ScalePiece tj_frequency(const Polynomial& p, const Polynomial& q, const TestFunction& f,
                        const TestFunction& g, int j, const std::vector<double>& xs,
                        double tol = 1e-9);

/// T_{j,m,n}: the frequency path restricted by hat(xi / 2^{aj+m}) hat(eta / 2^{bj+n}).
/// Throws BandError when a band passes the Nyquist frequency of a uniform xs
/// grid while the input still has spectral mass there.
ScalePiece tjmn(const Polynomial& p, const Polynomial& q, const TestFunction& f,
                const TestFunction& g, int j, int m, int n, const std::vector<double>& xs,
                double tol = 1e-10);

/// Default geometric grid for the maximal function: ratio sqrt 2 over [2^-20, 2^6].
std::vector<double> default_eps_grid();

struct MaximalReport {
  double value = 0.0;       // max over the grid of the averages
  double argmax_eps = 0.0;
  /// Upper bound on the sup over [eps_min, eps_max]: for eps between grid
  /// points e_i < e_{i+1}, the average is at most (e_{i+1}/e_i) avg(e_{i+1}).
  double upper_bound = 0.0;
  std::vector<double> eps;
  std::vector<double> averages;  // (1 / 2 eps) int_{-eps}^{eps} |F|
  std::vector<double> signed_averages;  // (1 / 2 eps) |int_{-eps}^{eps} F|
  double quadrature_error = 0.0;
};

/// Bilinear maximal function approximated on a geometric eps grid (ratio <= 2).
MaximalReport maximal(const Polynomial& p, const Polynomial& q, const TestFunction& f,
                      const TestFunction& g, double x, const std::vector<double>& eps_grid,
                      const PVOptions& opt = {});

struct JacobianRow {
  int j = 0;
  double min_abs = 0.0;  // min |Q1' - P1'| over 2^{-j-1} <= |t| <= 2^{-j+1}
  double at_t = 0.0;
  double ratio = 0.0;    // min_abs / 2^{-dj}
};

struct JacobianScan {
  int multiplicity = 0;  // d: multiplicity of t0 as a root of Q' - P'
  Polynomial jacobian;   // Q1' - P1' after recentering at t0
  std::vector<JacobianRow> rows;
};

/// Throws PreconditionError unless t0 is a nonzero root of Q' - P'.
JacobianScan jacobian_scan(const Polynomial& p, const Polynomial& q, const Rational& t0,
                           const std::vector<int>& j_range);

/// Evaluates bht_truncated over xs in parallel; results are in xs order.
std::vector<PVResult> bht_on_grid(const Polynomial& p, const Polynomial& q, const TestFunction& f,
                                  const TestFunction& g, const std::vector<double>& xs,
                                  double eps, double R, const PVOptions& opt = {});

/// n evenly spaced points from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace bht
