#pragma once

#include <stdexcept>
#include <string>

namespace blochwork {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition or domain invariant was violated by the caller.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A computation failed numerically (not a caller error per se).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// File-system failure while reading or writing outputs.
class IoError : public Error {
 public:
  using Error::Error;
};

// Named conditions. Each corresponds to one documented failure mode of a
// specific operation; catching the broad bases above is usually enough.

class OutsideBall : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DegenerateCoherence : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class PredictabilityPole : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ZeroPolarization : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class StepTooLarge : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class OpenPath : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class UnsupportedRegion : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NotSupported : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class SingularDrift : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace blochwork
