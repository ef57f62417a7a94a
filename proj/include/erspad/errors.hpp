// ============================================================================
// errors.hpp -- exception types shared by all erspad modules
// ============================================================================
#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace erspad {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (negative time,
/// negative rate, probability >= 1, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

/// A measured rate cannot be produced by the model: it is at or above the
/// supremum of the forward rate map.
class SaturationError : public Error {
public:
  SaturationError(const std::string& what, double supremum)
      : Error(what), supremum_(supremum) {}

  double supremum() const noexcept { return supremum_; }

private:
  double supremum_;
};

/// The detector-on time has no finite mean (zero rate or a bounded
/// cumulative efficiency).
class DivergenceError : public Error {
public:
  using Error::Error;
};

/// Quadrature, root finding or another numerical kernel failed to reach its
/// tolerance.
class NumericError : public Error {
public:
  using Error::Error;
};

/// An optimizer did not converge. `trace()` carries the iteration log.
class FitError : public Error {
public:
  FitError(const std::string& what, std::string trace)
      : Error(what), trace_(std::move(trace)) {}

  const std::string& trace() const noexcept { return trace_; }

private:
  std::string trace_;
};

/// The data cannot identify the requested parameters.
class IllPosedError : public Error {
public:
  using Error::Error;
};

/// A simulation cannot make progress (e.g. zero rate with an event-count
/// stop condition).
class ProgressError : public Error {
public:
  using Error::Error;
};

/// File input/output failure or malformed file contents.
class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace erspad
