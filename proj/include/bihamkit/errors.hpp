#pragma once

#include <stdexcept>
#include <string>

namespace bihamkit {

// Base class for every error raised by the library. The CLI maps all of
// these to exit code 2 (input/usage error).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when two q-entries (or singular values) are closer than the
// regularity threshold.
class RegularityError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

// Bad shapes, violated constraints, non-finite values.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Gauss factorization without pivoting hit a vanishing leading minor, or a
// square root fell on the branch cut.
class FactorizationError : public Error {
 public:
  using Error::Error;
};

}  // namespace bihamkit
