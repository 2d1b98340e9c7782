#include "bht/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "bht/errors.hpp"
#include "bht/fft.hpp"
#include "bht/quadrature.hpp"

namespace bht {

double bump_profile(double s) {
  const double q = 1.0 - s * s;
  if (q <= 0.0) return 0.0;
  return std::exp(-1.0 / q);
}

double log_partition(double s) {
  if (!(std::abs(s) < 1.0)) return 0.0;
  // Only the translates by -1, 0, 1 can be nonzero for |s| < 1, and at least
  // one of them is bounded below, so the denominator never vanishes.
  const double num = bump_profile(s);
  const double den = num + bump_profile(s - 1.0) + bump_profile(s + 1.0);
  return num / den;
}

double UnitBump::operator()(double t) const {
  const double a = std::abs(t);
  if (!(a > 0.5 && a < 2.0)) return 0.0;
  return log_partition(std::log2(a));
}

double DyadicKernel::operator()(double t) const {
  if (t == 0.0) return 0.0;
  return bump_(t) / t;
}

double DyadicKernel::scaled(int j, double t) const {
  const double p = std::ldexp(1.0, j);
  return p * (*this)(p * t);
}

double DyadicKernel::abs_integral() const {
  static const double value = [] {
    DyadicKernel rho;
    auto f = [&](double t) { return std::abs(rho(t)); };
    quad::Options opt;
    opt.abs_tol = 1e-14;
    return 2.0 * quad::integrate<double>(f, 0.5, 2.0, opt).value;
  }();
  return value;
}

FrequencyCutoff::FrequencyCutoff(const CutoffGrid& grid) : grid_(grid) {
  const double span = 2.0 * grid.half_width;
  const auto n = static_cast<std::size_t>(std::llround(span * static_cast<double>(grid.samples_per_unit)));
  if (!is_power_of_two(n) || n < 8) {
    throw PreconditionError("cutoff grid sample count must be a power of two >= 8");
  }
  const double dxi = 1.0 / static_cast<double>(grid.samples_per_unit);
  dx_ = 1.0 / (static_cast<double>(n) * dxi);
  std::vector<std::complex<double>> spectrum(n);
  const long half = static_cast<long>(n / 2);
  for (std::size_t k = 0; k < n; ++k) {
    const double xi = static_cast<double>(static_cast<long>(k) - half) * dxi;
    // (-1)^k centers the zero frequency for the unshifted transform.
    spectrum[k] = (k % 2 == 0 ? 1.0 : -1.0) * hat(xi);
  }
  auto out = dft(spectrum, FftDirection::Inverse);
  time_x_.resize(n);
  time_.resize(n);
  // exp(i pi N/2) = 1 for N a multiple of 4.
  for (std::size_t i = 0; i < n; ++i) {
    time_x_[i] = static_cast<double>(static_cast<long>(i) - half) * dx_;
    time_[i] = (i % 2 == 0 ? 1.0 : -1.0) * out[i] * dxi;
  }
}

double FrequencyCutoff::hat(double xi) const {
  const double a = std::abs(xi);
  if (!(a > 0.5 && a < 2.0)) return 0.0;
  return log_partition(std::log2(a));
}

double FrequencyCutoff::hat_scaled(int k, double xi) const { return hat(std::ldexp(xi, -k)); }

double FrequencyCutoff::time_imag_ratio() const {
  double max_abs = 0.0;
  double max_imag = 0.0;
  for (const auto& v : time_) {
    max_abs = std::max(max_abs, std::abs(v));
    max_imag = std::max(max_imag, std::abs(v.imag()));
  }
  return max_abs > 0.0 ? max_imag / max_abs : 0.0;
}

std::complex<double> FrequencyCutoff::time_integral() const {
  std::complex<double> s{};
  for (const auto& v : time_) s += v;
  return s * dx_;
}

UnitBump make_unit_bump() { return {}; }
DyadicKernel make_rho() { return {}; }

FrequencyCutoff make_freq_cutoff(const CutoffGrid& grid) {
  if (grid.half_width < 2.0) {
    throw PreconditionError("cutoff grid must cover |xi| <= 2");
  }
  FrequencyCutoff cutoff(grid);
  // The sampled window must reproduce hat's mass and its partition identity.
  quad::Options opt;
  opt.abs_tol = 1e-14;
  opt.panel_tol = 1e-15;
  const double exact =
      2.0 * quad::integrate<double>([&](double xi) { return cutoff.hat(xi); }, 0.5, 2.0, opt).value;
  const double dxi = 1.0 / static_cast<double>(grid.samples_per_unit);
  double riemann = 0.0;
  const auto n = cutoff.time_x().size();
  for (std::size_t k = 0; k < n; ++k) {
    riemann += cutoff.hat((static_cast<double>(k) - static_cast<double>(n / 2)) * dxi);
  }
  riemann *= dxi;
  if (std::abs(riemann - exact) > 1e-10) {
    throw PreconditionError("cutoff grid too coarse: sampled mass residual " +
                            std::to_string(std::abs(riemann - exact)));
  }
  return cutoff;
}

namespace {

bool in_guaranteed_range(double t, int scales) {
  const double a = std::abs(t);
  return a >= std::ldexp(1.0, -scales + 2) && a <= std::ldexp(1.0, scales - 2);
}

template <class Residual>
PartitionCheck run_check(std::span<const double> samples, int scales, Residual residual) {
  PartitionCheck out;
  for (double t : samples) {
    if (!in_guaranteed_range(t, scales)) {
      ++out.flagged;
      continue;
    }
    out.max_residual = std::max(out.max_residual, residual(t));
  }
  return out;
}

}  // namespace

PartitionCheck verify_partition(const DyadicKernel& rho, std::span<const double> samples,
                                int scales) {
  return run_check(samples, scales, [&](double t) {
    double sum = 0.0;
    for (int j = -scales; j <= scales; ++j) sum += rho.scaled(j, t);
    return std::abs(t * sum - 1.0);
  });
}

PartitionCheck verify_partition(const UnitBump& bump, std::span<const double> samples,
                                int scales) {
  return run_check(samples, scales, [&](double t) {
    double sum = 0.0;
    for (int j = -scales; j <= scales; ++j) sum += bump(std::ldexp(t, j));
    return std::abs(sum - 1.0);
  });
}

PartitionCheck verify_partition(const FrequencyCutoff& cutoff, std::span<const double> samples,
                                int scales) {
  return run_check(samples, scales, [&](double xi) {
    double sum = 0.0;
    for (int m = -scales; m <= scales; ++m) sum += cutoff.hat_scaled(m, xi);
    return std::abs(sum - 1.0);
  });
}

std::vector<double> log_samples(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0 && hi > lo) || n < 2) throw PreconditionError("log_samples needs 0 < lo < hi, n >= 2");
  std::vector<double> out(n);
  const double a = std::log2(lo);
  const double b = std::log2(hi);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::exp2(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return out;
}

void write_kernel_csv(std::ostream& out, const DyadicKernel& rho, std::span<const double> ts) {
  out << "t,rho\n";
  out.precision(17);
  for (double t : ts) out << t << ',' << rho(t) << '\n';
}

void write_kernel_csv(std::ostream& out, const UnitBump& bump, std::span<const double> ts) {
  out << "t,rho0\n";
  out.precision(17);
  for (double t : ts) out << t << ',' << bump(t) << '\n';
}

void write_kernel_csv(std::ostream& out, const FrequencyCutoff& cutoff,
                      std::span<const double> xis) {
  out << "xi,phi_hat\n";
  out.precision(17);
  for (double xi : xis) out << xi << ',' << cutoff.hat(xi) << '\n';
}

}  // namespace bht
