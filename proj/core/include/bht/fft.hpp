#pragma once

#include <complex>
#include <vector>

namespace bht {

enum class FftDirection { Forward, Inverse };

/// Unnormalized DFT: Forward uses exp(-2 pi i k n / N), Inverse exp(+2 pi i k n / N).
/// Plans are created per call with a private buffer; safe to call from
/// several threads.
std::vector<std::complex<double>> dft(const std::vector<std::complex<double>>& in,
                                      FftDirection direction);

bool is_power_of_two(std::size_t n);

}  // namespace bht
