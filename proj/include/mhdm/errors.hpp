#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mhdm {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
  using Error::Error;
};

class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// A spectrum handed to the inverse transform is not conjugate symmetric.
class NonHermitianSpectrum : public Error {
public:
  using Error::Error;
};

class ZeroPolynomial : public Error {
public:
  using Error::Error;
};

class IndexOutOfRange : public Error {
public:
  using Error::Error;
};

/// Numerical failure inside the per-frequency solver. Carries the bin and,
/// once it has propagated through a driver, the iteration index.
class SolverError : public Error {
public:
  SolverError(const std::string& what, std::size_t row, std::size_t col, long iteration = -1)
      : Error(what), row_(row), col_(col), iteration_(iteration) {}

  std::size_t row() const { return row_; }
  std::size_t col() const { return col_; }
  long iteration() const { return iteration_; }

private:
  std::size_t row_;
  std::size_t col_;
  long iteration_;
};

/// The quintic produced no real root; unreachable for a well-formed problem.
class NoRealRoot : public SolverError {
public:
  using SolverError::SolverError;
};

} // namespace mhdm

namespace mhdm {

class InvalidSigma : public InvalidArgument {
public:
  using InvalidArgument::InvalidArgument;
};

class InvalidWeights : public InvalidArgument {
public:
  using InvalidArgument::InvalidArgument;
};

/// Image below the minimum size of a windowed metric.
class TooSmall : public InvalidArgument {
public:
  using InvalidArgument::InvalidArgument;
};

class ZeroReference : public InvalidArgument {
public:
  using InvalidArgument::InvalidArgument;
};

} // namespace mhdm
