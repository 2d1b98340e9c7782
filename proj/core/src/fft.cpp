#include "bht/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>

#include "bht/errors.hpp"

namespace bht {

namespace {
// FFTW's planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::vector<std::complex<double>> dft(const std::vector<std::complex<double>>& in,
                                      FftDirection direction) {
  const int n = static_cast<int>(in.size());
  if (n == 0) return {};
  auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * in.size()));
  if (buf == nullptr) throw Error("fftw_malloc failed");
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_1d(n, buf, buf,
                            direction == FftDirection::Forward ? FFTW_FORWARD : FFTW_BACKWARD,
                            FFTW_ESTIMATE);
  }
  std::memcpy(buf, in.data(), sizeof(fftw_complex) * in.size());
  fftw_execute(plan);
  std::vector<std::complex<double>> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = {buf[i][0], buf[i][1]};
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(buf);
  return out;
}

}  // namespace bht
