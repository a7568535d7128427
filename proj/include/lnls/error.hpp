#pragma once

#include <stdexcept>
#include <string>

namespace lnls {

/// Precondition violated (bad exponent, axis, scale, hypothesis of an inequality).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Operands live on different lattices or have the wrong length.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A quadrature or self-convergence check did not reach its tolerance.
class AccuracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integrator blew up (non-finite values or runaway norm growth).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reading or writing an artifact failed, or a file has the wrong format.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configuration document is malformed; the message names the field or line.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lnls
