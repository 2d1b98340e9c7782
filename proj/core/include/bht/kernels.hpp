#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace bht {

/// Number of dyadic scales on each side of zero used by the partition checks.
inline constexpr int kDefaultScales = 48;

/// exp(-1/(1-s^2)) on (-1, 1), zero elsewhere.
double bump_profile(double s);

/// The bump profile normalized by its integer translates, so that
/// sum_k log_partition(s + k) = 1 for every real s. Supported in (-1, 1).
double log_partition(double s);

/// Smooth, even, nonnegative bump supported in 1/2 < |t| < 2 whose dyadic
/// dilates sum to one: sum_j rho0(2^j t) = 1 for t != 0.
class UnitBump {
 public:
  double operator()(double t) const;
};

/// Odd kernel rho(t) = rho0(|t|)/t, so that sum_j 2^j rho(2^j t) = 1/t.
class DyadicKernel {
 public:
  double operator()(double t) const;
  /// Value of 2^j rho(2^j t).
  double scaled(int j, double t) const;
  /// int |rho(t)| dt, computed once by adaptive quadrature.
  double abs_integral() const;

 private:
  UnitBump bump_;
};

struct CutoffGrid {
  /// Frequencies sampled on [-half_width, half_width).
  double half_width = 4.0;
  /// Samples per unit frequency; total count must be a power of two.
  std::size_t samples_per_unit = 1024;
};

/// Frequency cutoff with hat(xi) supported in 1/2 < |xi| < 2 and
/// sum_m hat(xi / 2^m) = 1 for xi != 0. The time side Phi is the discrete
/// inverse Fourier transform of the sampled hat.
class FrequencyCutoff {
 public:
  explicit FrequencyCutoff(const CutoffGrid& grid);

  double hat(double xi) const;
  /// hat(xi / 2^k): the multiplier of the k-th Littlewood-Paley piece.
  double hat_scaled(int k, double xi) const;

  const CutoffGrid& grid() const noexcept { return grid_; }
  double dx() const noexcept { return dx_; }
  const std::vector<double>& time_x() const noexcept { return time_x_; }
  const std::vector<std::complex<double>>& time_values() const noexcept { return time_; }
  /// max |Im Phi| / max |Phi| over the sampled window.
  double time_imag_ratio() const;
  /// Riemann sum of Phi over the window (equals hat(0) = 0 up to rounding).
  std::complex<double> time_integral() const;

 private:
  CutoffGrid grid_;
  double dx_ = 0.0;
  std::vector<double> time_x_;
  std::vector<std::complex<double>> time_;
};

UnitBump make_unit_bump();
DyadicKernel make_rho();
/// Throws PreconditionError when the grid cannot resolve the cutoff.
FrequencyCutoff make_freq_cutoff(const CutoffGrid& grid = {});

struct PartitionCheck {
  double max_residual = 0.0;
  /// Samples outside 2^{-J+2} <= |t| <= 2^{J-2}; flagged and excluded.
  std::size_t flagged = 0;
};

/// Residual of sum_{|j|<=J} 2^j rho(2^j t) against 1/t, measured relative to
/// 1/t (that is |t * sum - 1|).
PartitionCheck verify_partition(const DyadicKernel& rho, std::span<const double> samples,
                                int scales = kDefaultScales);
/// |sum_{|j|<=J} rho0(2^j t) - 1|.
PartitionCheck verify_partition(const UnitBump& bump, std::span<const double> samples,
                                int scales = kDefaultScales);
/// |sum_{|m|<=J} hat(xi / 2^m) - 1|.
PartitionCheck verify_partition(const FrequencyCutoff& cutoff, std::span<const double> samples,
                                int scales = kDefaultScales);

/// n points spaced evenly in log2 between lo and hi (both positive).
std::vector<double> log_samples(double lo, double hi, std::size_t n);

/// CSV dumps for plotting: header then one row per sample.
void write_kernel_csv(std::ostream& out, const DyadicKernel& rho, std::span<const double> ts);
void write_kernel_csv(std::ostream& out, const UnitBump& bump, std::span<const double> ts);
void write_kernel_csv(std::ostream& out, const FrequencyCutoff& cutoff,
                      std::span<const double> xis);

}  // namespace bht
