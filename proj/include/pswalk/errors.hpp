#pragma once

#include <stdexcept>
#include <string>

namespace pswalk {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A matrix failed the Hermitian symmetry check.
class NotHermitian : public Error {
 public:
  using Error::Error;
};

// An iterative eigensolver exceeded its iteration cap.
class NoConvergence : public Error {
 public:
  using Error::Error;
};

// Operand dimensions are incompatible with the requested operation.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// Two sequences that must have equal length do not.
class LengthMismatch : public Error {
 public:
  using Error::Error;
};

// A series handed to a fitting routine has too few points or a
// zero-variance predictor.
class DegenerateSeries : public Error {
 public:
  using Error::Error;
};

// A run configuration (file or flags) is malformed or violates an invariant.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace pswalk
