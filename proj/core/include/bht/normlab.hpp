#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "bht/errors.hpp"
#include "bht/polynomial.hpp"
#include "bht/pvquad.hpp"
#include "bht/testfuncs.hpp"

namespace bht {

/// Bilinear evaluator (f, g) -> output sampled on xs.
struct ProbeOperator {
  std::string label;
  std::function<std::vector<std::complex<double>>(const TestFunction&, const TestFunction&,
                                                  const std::vector<double>&)>
      eval;
};

ProbeOperator zero_operator();
ProbeOperator pointwise_product();
ProbeOperator tj_operator(const Polynomial& p, const Polynomial& q, int j,
                          const PVOptions& opt = {});

/// Closed x interval sampled at n equispaced points, endpoints included.
struct XGrid {
  double x0 = -16.0;
  double x1 = 16.0;
  std::size_t n = 513;
  std::vector<double> points() const { return linspace(x0, x1, n); }
  XGrid refined() const { return {x0, x1, 2 * n - 1}; }
};

/// Output mass escapes the x grid.
class GridMassError : public Error {
 public:
  GridMassError(const std::string& what, double boundary_ratio)
      : Error(what), boundary_ratio_(boundary_ratio) {}
  double boundary_ratio() const noexcept { return boundary_ratio_; }

 private:
  double boundary_ratio_;
};

/// Lower-bound probe of an operator norm on one input pair.
struct ProbeResult {
  std::string operator_label;
  std::string f_label;
  std::string g_label;
  Rational p, q, r;
  double ratio = 0.0;  // ||B(f,g)||_r / (||f||_p ||g||_q)
  double output_norm = 0.0;
  double f_norm = 0.0;
  double g_norm = 0.0;
  /// max(|B(x0)|, |B(x1)|) / max |B| over the grid.
  double boundary_ratio = 0.0;
  XGrid grid;
};

/// Trapezoid L^r norm of samples on an equispaced grid.
double trapezoid_lr_norm(const std::vector<std::complex<double>>& y, double dx, double r);

/// Throws PreconditionError unless 1/r = 1/p + 1/q exactly, and GridMassError
/// when the output at the grid ends exceeds 1e-6 of its peak.
ProbeResult ratio_probe(const ProbeOperator& op, const TestFunction& f, const TestFunction& g,
                        const Rational& p, const Rational& q, const Rational& r, const XGrid& grid);

struct DecayPoint {
  int m = 0;
  int j = 0;
  std::string probe;
  double ratio = 0.0;
};

struct DecayFit {
  std::vector<int> abscissa;     // m
  std::vector<double> ordinate;  // sup ratio at each m
  double fitted_exponent = 0.0;  // slope of -log2(ordinate) against m
  double intercept = 0.0;
  double residual = 0.0;         // max |-log2 y - fit|
  std::vector<DecayPoint> table;
};

/// Least squares on (m, -log2 y). Throws PreconditionError for fewer than 4
/// points or y <= 0.
DecayFit fit_decay_exponent(const std::vector<std::pair<double, double>>& points);

/// Band-adapted Gaussian probe shape: f has frequency 2^{aj+m} u and g has
/// 2^{bj+m} v, each with relative bandwidth delta, so (f, g) lives in the
/// (m, m) frequency cell at scale j.
struct BandProbe {
  std::string label;
  double u = 1.5;
  double v = -0.75;
  double delta = 0.05;
};

std::vector<BandProbe> default_band_probes();

/// A concrete probe pair with the x window carrying its output.
struct BandProbePair {
  TestFunction f;
  TestFunction g;
  XGrid grid;
  double t_stationary = 0.0;
};

/// Centers f and g so that x - P(t) and x - Q(t) meet their atoms at the
/// stationary point of the t-phase.
BandProbePair make_band_probe(const Polynomial& p, const Polynomial& q, int j, int m,
                              const BandProbe& shape, std::size_t x_points = 257);

/// Raised when a scan cannot finish; carries the rows completed so far.
class ScanAborted : public Error {
 public:
  ScanAborted(const std::string& what, DecayFit partial)
      : Error(what), partial_(std::move(partial)) {}
  const DecayFit& partial() const noexcept { return partial_; }

 private:
  DecayFit partial_;
};

/// Operator applied to the probe built for scale j and frequency step m.
using ScanOperatorFactory = std::function<ProbeOperator(int j, int m)>;

/// For each m: sup over j in the window and over probes of
/// ||T_j(f, g)||_1 / (||f||_2 ||g||_2) with (f, g) adapted to the (j, m, m)
/// cell, then the fitted exponent. Ratios are lower-bound probes.
DecayFit m_decay_scan(const Polynomial& p, const Polynomial& q, const std::vector<int>& j_window,
                      const std::vector<int>& m_range, const std::vector<BandProbe>& probes,
                      std::size_t x_points = 257, const PVOptions& opt = {});
DecayFit m_decay_scan(const Polynomial& p, const Polynomial& q, const std::vector<int>& j_window,
                      const std::vector<int>& m_range, const std::vector<BandProbe>& probes,
                      const ScanOperatorFactory& op_for, std::size_t x_points = 257);

/// Synthetic operator returning 2^{-slope m} ||f||_2 ||g||_2 times a unit-mass
/// Gaussian on the probe window; used to check that a planted slope is
/// recovered by the scan.
ScanOperatorFactory planted_decay_operator(double slope);

struct CounterexampleCase {
  std::string label;
  Polynomial p;
  Polynomial q;
  bool expect_zero = true;
  double max_abs = 0.0;         // max |B(f,g)(x)| over probes and grid
  double max_normalized = 0.0;  // max |B| / (||f||_inf ||g||_inf)
  std::string worst_probe;
  double worst_x = 0.0;
  std::size_t evaluations = 0;
  bool passed = false;
};

struct CounterexampleReport {
  std::vector<CounterexampleCase> cases;
  int correlation_degree = 0;  // for the (t^6, 3t^4 - 3t^2) pair
  Rational threshold;
  bool degree_ok = false;
  bool passed = false;
};

/// Truncation used by the suite.
inline constexpr double kSuiteEps = 1e-6;
inline constexpr double kSuiteR = 64.0;

/// Zero-operator checks for even/even pairs plus the (t, t^2) control, over
/// probe pairs (probes[i], probes[i+1 mod n]) and every x.
CounterexampleReport counterexample_suite(const std::vector<double>& xs,
                                          const std::vector<TestFunction>& probes,
                                          const PVOptions& opt = {});

}  // namespace bht
