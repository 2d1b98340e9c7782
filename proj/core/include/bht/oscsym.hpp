#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "bht/polynomial.hpp"
#include "bht/realpoly.hpp"

namespace bht {

/// An evaluated oscillatory symbol.
struct SymbolSample {
  double xi = 0.0;
  double eta = 0.0;
  std::complex<double> value;
  double abs_error = 0.0;
  int j = 0;
  int m = 0;
  int n = 0;
};

/// Phase data at scale j after trailing normalization:
///   P(t) = p_scale (t^a + P_eps(t)),  eps_P(s) = 2^{aj} P_eps(2^{-j} s),
/// and likewise for Q. The rescaled phase is
///   xi (s^a + eps_P(s)) + eta (s^b + eps_Q(s)).
struct PhaseModel {
  PhaseModel(const Polynomial& p, const Polynomial& q, int j = 0);

  int a = 1;
  int b = 1;
  int j = 0;
  Rational p_scale;
  Rational q_scale;
  Polynomial p_rescaled;  // s^a + eps_P(s)
  Polynomial q_rescaled;  // s^b + eps_Q(s)
  Polynomial eps_p;
  Polynomial eps_q;

  /// xi * p_rescaled + eta * q_rescaled with double coefficients.
  RealPoly phase(double xi, double eta) const;
};

/// Tolerance knobs shared by the symbol routines.
struct SymbolOptions {
  /// Summed error target. Quarter-wavelength K15 panels are accurate far
  /// below this; the estimate itself grows with the panel count.
  double abs_tol = 1e-12;
  std::size_t max_panels = 4'000'000;
};

/// m_j(xi, eta) = int 2^j rho(2^j t) e^{-2 pi i (xi P(t) + eta Q(t))} dt, by
/// oscillation-aware Gauss-Kronrod over 2^{-j-1} < |t| < 2^{-j+1}. With
/// `check_rescaled` the rescaled-variable form is evaluated too and an Error is
/// thrown if the two differ by more than 1e-9 plus their error estimates.
SymbolSample mj(const Polynomial& p, const Polynomial& q, int j, double xi, double eta,
                bool check_rescaled = false, const SymbolOptions& opt = {});

/// The same symbol computed in rescaled variables s = 2^j t, with frequencies
/// xi p_scale / 2^{aj}, eta q_scale / 2^{bj} against the unit-scale kernel.
SymbolSample mj_rescaled(const PhaseModel& model, double xi, double eta,
                         const SymbolOptions& opt = {});

/// I_{rho,m}(xi, eta) = int rho(s) e^{-2 pi i 2^m (xi (s^a + eps_P) + eta (s^b + eps_Q))} ds
/// with eps terms at scale model.j. Requires 1/2 <= |xi|, |eta| <= 2.
SymbolSample rescaled_symbol(const PhaseModel& model, int m, double xi, double eta,
                             const SymbolOptions& opt = {});
SymbolSample rescaled_symbol(const Polynomial& p, const Polynomial& q, int m, double xi,
                             double eta, const SymbolOptions& opt = {});

/// M_{j,m,n}(xi, eta) = m_j(xi, eta) hat(xi / 2^{aj+m}) hat(eta / 2^{bj+n}).
SymbolSample band_symbol(const PhaseModel& model, int m, int n, double xi, double eta,
                         const SymbolOptions& opt = {});

/// Integral of rho(s) e^{-2 pi i phase(s)} over the unit-scale support, the
/// engine behind every symbol above.
SymbolSample kernel_phase_integral(const RealPoly& phase, const SymbolOptions& opt = {});

/// Critical point data for the rescaled phase.
struct PhaseRecord {
  double t_crit = 0.0;
  double phi = 0.0;       // phase value at t_crit
  double phi_second = 0.0;
  double phi_star = 0.0;  // monomial phase xi t1^a + eta t1^b (NaN when t1 is not real)
  double t1 = 0.0;
  double err_term = 0.0;  // phi - phi_star
  double residual = 0.0;  // |phi'(t_crit)|
  bool interior = true;   // 1/2 < |t_crit| < 2
};

struct CriticalPoints {
  std::vector<PhaseRecord> records;  // in increasing t_crit
  /// Real roots of phi' found outside the open support 1/2 < |t| < 2 (boundary included);
  /// reported, not used.
  std::vector<double> outside;
  bool non_stationary() const { return records.empty(); }
  /// Record closest to the monomial critical point t1 (the first if none).
  const PhaseRecord& primary() const;
};

/// All roots of phi'(t) = xi (s^a + eps_P)' + eta (s^b + eps_Q)' in the domain,
/// isolated exactly by Sturm sequences and polished by safeguarded Newton.
/// Throws PreconditionError when xi = eta = 0.
CriticalPoints critical_point(const PhaseModel& model, double xi, double eta);
CriticalPoints critical_point(const Polynomial& p, const Polynomial& q, double xi, double eta,
                              int j = 0);

/// Real branches of t1 = (-a xi / (b eta))^{1/(b-a)}.
std::vector<double> monomial_critical_points(int a, int b, double xi, double eta);

struct StationaryRow {
  int m = 0;
  double normalized_magnitude = 0.0;  // |I| 2^{m/2}
  /// wrap(arg I + 2 pi 2^m phi) to (-pi, pi]; tends to (pi/4) sign(-phi'').
  double phase_residual = 0.0;
  double abs_error = 0.0;
};

/// Throws PreconditionError when there is no interior critical point and
/// Error when phi''(t0) is numerically zero.
std::vector<StationaryRow> stationary_phase_check(const PhaseModel& model, double xi, double eta,
                                                  const std::vector<int>& m_range,
                                                  const SymbolOptions& opt = {});

struct DecayRow {
  int m = 0;
  double magnitude = 0.0;
  double abs_error = 0.0;
};

/// |I_{rho,m}| over m_range, for the non-stationary regime.
std::vector<DecayRow> symbol_magnitudes(const PhaseModel& model, double xi, double eta,
                                        const std::vector<int>& m_range,
                                        const SymbolOptions& opt = {});

struct SurfaceRow {
  int m = 0;
  int n = 0;
  double sup_abs = 0.0;
  double arg_xi = 0.0;
  double arg_eta = 0.0;
  double abs_error = 0.0;
};

/// Sup of |M_{j,m,n}| over a samples x samples log-spaced grid of the band
/// product, for every (m, n) in the box. Uses M(-xi,-eta) = conj M(xi,eta) to
/// evaluate only xi > 0.
std::vector<SurfaceRow> symbol_decay_scan(const Polynomial& p, const Polynomial& q, int j,
                                          const std::vector<int>& m_values,
                                          const std::vector<int>& n_values, int samples = 16,
                                          const SymbolOptions& opt = {});

/// Band sample points: `samples` values of +-2^s with s spaced at cell
/// midpoints in (-1, 1), half per sign.
std::vector<double> band_samples(int samples);

struct MixedDerivativeReport {
  double min_normalized = 0.0;  // min over grid of |d_xi d_eta Q_tau| / |tau|
  double at_xi = 0.0;
  double at_eta = 0.0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
  bool degenerate = false;  // tau == 0
  std::string note;
};

/// Q_tau(xi, eta) = phi(xi, eta) - phi(xi - tau, eta + tau / 2^{(b-a)j}) with phi
/// the critical value of the rescaled phase at scale model.j. The mixed
/// derivative is a central difference with step h and one Richardson step.
MixedDerivativeReport mixed_derivative_check(const PhaseModel& model, double tau,
                                             const std::vector<double>& xis,
                                             const std::vector<double>& etas,
                                             double step = 1e-4);

/// Richardson-extrapolated central mixed difference of f at (x, y).
template <class F>
double mixed_difference(const F& f, double x, double y, double h) {
  auto d = [&](double s) {
    return (f(x + s, y + s) - f(x + s, y - s) - f(x - s, y + s) + f(x - s, y - s)) / (4.0 * s * s);
  };
  return (4.0 * d(0.5 * h) - d(h)) / 3.0;
}

/// Critical value of the rescaled phase; nullopt when non-stationary.
std::optional<double> critical_value(const PhaseModel& model, double xi, double eta);

/// zeta(z) solves d/dx (x^{b/(b-a)} + eps(x) + z x) = 0 on 1/2 <= x <= 2 and
/// beta(z) is the phase value there.
struct BetaValue {
  double zeta = 0.0;
  double beta = 0.0;
};
std::optional<BetaValue> beta_function(int a, int b, const RealPoly& eps, double z);

}  // namespace bht
