#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bht/errors.hpp"

namespace bht::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitConfig = 2;

/// Invalid configuration; `field` is the dotted path, e.g. "evaluate.f".
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : Error(field + ": " + what), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Inclusive integer range "a:b" (or a single integer).
std::vector<int> parse_int_range(const std::string& field, const std::string& text);

/// "lo:hi:n" grid, or a single number giving a one-point grid.
std::vector<double> parse_grid(const std::string& field, const std::string& text);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Suites: kernels, algebra, counterexamples, linear, decomposition,
/// stationary, jacobian, mixed, maximal, decay, or all. probe_sample = 0 uses
/// every catalog probe; otherwise that many are drawn with the seed.
std::vector<CheckResult> run_suite(const std::string& suite, std::uint64_t seed = 0,
                                   std::size_t probe_sample = 0);

/// Entry point behind the `bht` executable. The JSON report goes to `out`,
/// diagnostics to `err`. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bht::cli
