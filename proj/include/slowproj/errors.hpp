#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace slowproj {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class NonSquareError : public Error {
public:
  using Error::Error;
};

class ShapeMismatchError : public Error {
public:
  using Error::Error;
};

class NumericalFailureError : public Error {
public:
  using Error::Error;
};

class SingularError : public Error {
public:
  using Error::Error;
};

class NearDefectiveError : public Error {
public:
  using Error::Error;
};

/// Raised when a system (or a slow mode) fails the strict stability
/// requirement Re(lambda) < -1e-10. Carries the offending eigenvalue.
class UnstableError : public Error {
public:
  explicit UnstableError(std::complex<double> offending)
      : Error("unstable eigenvalue " + format(offending)), offending_(offending) {}

  std::complex<double> offending_eigenvalue() const { return offending_; }

private:
  static std::string format(std::complex<double> z) {
    return "(" + std::to_string(z.real()) + ", " + std::to_string(z.imag()) + ")";
  }

  std::complex<double> offending_;
};

class ConjugatePairSplitError : public Error {
public:
  using Error::Error;
};

class OutOfRangeError : public Error {
public:
  using Error::Error;
};

class RankDeficientError : public Error {
public:
  using Error::Error;
};

class GapTooSmallError : public Error {
public:
  using Error::Error;
};

class DegenerateSpectrumError : public Error {
public:
  using Error::Error;
};

class BadParamsError : public Error {
public:
  using Error::Error;
};

class NoConvergenceError : public Error {
public:
  using Error::Error;
};

class GridMismatchError : public Error {
public:
  using Error::Error;
};

class StepUnderflowError : public Error {
public:
  using Error::Error;
};

/// Raised when a slow basis does not span an invariant subspace of the
/// operator, i.e. it cannot be reduced to eigenpairs.
class NonInvariantBasisError : public Error {
public:
  using Error::Error;
};

class UnsupportedDimensionError : public Error {
public:
  using Error::Error;
};

class ValidationFailedError : public Error {
public:
  using Error::Error;
};

class BadModelError : public Error {
public:
  using Error::Error;
};

class BadRangeError : public Error {
public:
  using Error::Error;
};

}  // namespace slowproj
