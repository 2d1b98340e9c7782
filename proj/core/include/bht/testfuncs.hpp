#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "bht/kernels.hpp"

namespace bht {

/// weight * exp(-pi ((x - center) / sigma)^2) * exp(2 pi i modulation x).
struct Atom {
  double sigma = 1.0;
  double center = 0.0;
  double modulation = 0.0;
  std::complex<double> weight{1.0, 0.0};

  std::complex<double> operator()(double x) const;
};

/// Gaussian atoms beyond this many widths from their center are treated as
/// zero by quadrature panel pruning (exp(-pi K^2) ~ 1e-34).
inline constexpr double kAtomReach = 5.0;

/// Finite linear combination of Gaussian atoms. The empty combination is the
/// zero function.
class TestFunction {
 public:
  TestFunction() = default;
  explicit TestFunction(std::vector<Atom> atoms, std::string label = {});
  static TestFunction gaussian(double sigma = 1.0, double center = 0.0, double modulation = 0.0,
                               std::complex<double> weight = 1.0);

  std::complex<double> operator()(double x) const;

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  const std::string& label() const noexcept { return label_; }
  void set_label(std::string label) { label_ = std::move(label); }
  bool is_zero() const noexcept { return atoms_.empty(); }

  /// Upper bound on the local oscillation frequency: max |omega| + 2/sigma.
  double frequency_bound() const;
  /// True when every atom is below exp(-pi kAtomReach^2) of its peak on [lo, hi].
  bool negligible_on(double lo, double hi) const;
  /// Sum of |weight|, an upper bound on sup |f|.
  double peak_bound() const;

  TestFunction scaled(std::complex<double> alpha) const;
  friend TestFunction operator+(const TestFunction& a, const TestFunction& b);

 private:
  std::vector<Atom> atoms_;
  std::string label_;
};

/// Closed form, atom by atom, with fhat(xi) = int f(x) exp(-2 pi i x xi) dx.
TestFunction fourier_transform(const TestFunction& f);

/// ||f||_p for 0 < p < inf; p = inf gives the sup norm. Single atoms use the
/// closed form |w| (sigma / p^{1/2})^{1/p}; combinations use quadrature.
double lp_norm(const TestFunction& f, double p);
double sup_norm(const TestFunction& f);

/// Samples on x_i = x0 + i dx, i < N, dx = (x1 - x0) / N (periodic grid).
struct GridFunction {
  std::vector<std::complex<double>> samples;
  double x0 = 0.0;
  double dx = 1.0;
  std::vector<std::string> warnings;

  std::size_t size() const noexcept { return samples.size(); }
  double x(std::size_t i) const { return x0 + static_cast<double>(i) * dx; }
  /// Trapezoid (equivalently rectangle, the grid being periodic) Lp norm.
  double lp_norm(double p) const;
};

struct GridSpec {
  double x0 = -32.0;
  double x1 = 32.0;
  std::size_t n = std::size_t{1} << 14;
};

/// Throws PreconditionError if N is not a power of two. A warning is attached
/// when more than 1e-8 of the L2 mass lies outside the window.
GridFunction sample(const TestFunction& f, const GridSpec& grid);

/// Fraction of ||f||_2^2 outside [x0, x1], bounded atom by atom.
double mass_outside(const TestFunction& f, double x0, double x1);

/// Littlewood-Paley piece f * Phi_k on the grid: fhat(xi) hat(xi / 2^k) sampled
/// at the grid's discrete frequencies and inverted by FFT. Throws BandError
/// when the band 2^{k-1} < |xi| < 2^{k+1} passes the Nyquist frequency while f
/// still carries spectral mass there.
GridFunction lp_piece(const TestFunction& f, int k, const FrequencyCutoff& cutoff,
                      const GridSpec& grid = {});

/// Pointwise value of f * Phi_k at x by quadrature of fhat(xi) hat(xi/2^k)
/// e^{2 pi i xi x} over the band.
std::complex<double> lp_piece_at(const TestFunction& f, int k, const FrequencyCutoff& cutoff,
                                 double x);

/// Fraction of ||f||_2^2 carried by frequencies above nu in absolute value.
double spectral_mass_beyond(const TestFunction& f, double nu);

/// Named test functions. Built-in entries g1..g12 are Gaussian atoms on the
/// grid sigma in {1, 1/4, 4} x omega in {0, 2, 8} at c = 0 (g1..g9), plus three
/// off-center atoms at c = 1 (g10..g12).
class Catalog {
 public:
  static Catalog builtin();
  /// JSON array of {name?, sigma, center, modulation, weight_re, weight_im};
  /// entries sharing a name are summed into one combination.
  static Catalog from_json(std::istream& in);

  void add(const std::string& name, TestFunction f);
  bool contains(const std::string& name) const { return entries_.count(name) != 0; }
  /// Accepts "name" or "catalog:name"; throws PreconditionError naming the
  /// missing entry.
  const TestFunction& get(const std::string& ref) const;
  std::vector<std::string> names() const;
  std::vector<TestFunction> all() const;
  void write_json(std::ostream& out) const;

 private:
  std::map<std::string, TestFunction> entries_;
  std::vector<std::string> order_;
};

}  // namespace bht
