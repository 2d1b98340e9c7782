#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace bht {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed polynomial text; `position` is the 0-based byte offset.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// A documented precondition was violated by the caller.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// P' - Q' vanishes identically.
class DegeneratePairError : public Error {
 public:
  using Error::Error;
};

/// A frequency band does not fit inside the representable range of a grid.
class BandError : public Error {
 public:
  using Error::Error;
};

/// Quadrature could not reach the requested tolerance within its budget.
/// Carries the best estimate obtained so far.
class ToleranceError : public Error {
 public:
  ToleranceError(const std::string& what, std::complex<double> best,
                 double error_estimate)
      : Error(what), best_(best), error_estimate_(error_estimate) {}
  std::complex<double> best_estimate() const noexcept { return best_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  std::complex<double> best_;
  double error_estimate_;
};

}  // namespace bht
