#pragma once

#include <stdexcept>
#include <string>

namespace cyclocap {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed config file, flag or numeric expression. The CLI maps this to exit 2.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Pulse parameters violating tdc + 2*trf <= 1 or trf > 0.
class InvalidShapeError : public Error {
 public:
  using Error::Error;
};

/// Block size that is not a multiple of the sampled process period.
class PeriodMismatchError : public Error {
 public:
  using Error::Error;
};

/// A covariance or spectral density that is not positive definite.
class ModelInvalidError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class ShapeMismatchError : public Error {
 public:
  using Error::Error;
};

/// Requested dense problem larger than the configured solver cap.
class SizeLimitError : public Error {
 public:
  using Error::Error;
};

}  // namespace cyclocap
