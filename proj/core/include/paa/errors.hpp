#pragma once

#include <stdexcept>
#include <string>

namespace paa {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A pivot fell below the relative singularity threshold during LU.
class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class NonFiniteEvaluation : public Error {
 public:
  using Error::Error;
};

/// The requested preconditioner could not be factored (zero diagonal,
/// singular block or singular full matrix).
class SingularPreconditioner : public Error {
 public:
  using Error::Error;
};

class MissingLinearPart : public Error {
 public:
  using Error::Error;
};

class RankDeficient : public Error {
 public:
  using Error::Error;
};

class InvalidSpec : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace paa
