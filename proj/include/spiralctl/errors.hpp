#pragma once

#include <stdexcept>
#include <string>

namespace spiralctl {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failures (CLI exit code 3).
class NumericError : public Error {
 public:
  using Error::Error;
};

class StepUnderflow : public NumericError {
 public:
  using NumericError::NumericError;
};

class NonFiniteState : public NumericError {
 public:
  using NumericError::NumericError;
};

class NoConvergence : public NumericError {
 public:
  using NumericError::NumericError;
};

class SingularMassMatrix : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Raised when the switching vector z1 (the adjoint psi) vanishes: the
/// maximum condition no longer determines the control.
class SingularControl : public NumericError {
 public:
  using NumericError::NumericError;
};

class PhaseJump : public NumericError {
 public:
  using NumericError::NumericError;
};

class OriginBlowUp : public NumericError {
 public:
  using NumericError::NumericError;
};

class DegenerateScale : public NumericError {
 public:
  using NumericError::NumericError;
};

class NoStableDirection : public NumericError {
 public:
  using NumericError::NumericError;
};

/// The co-rotating frame failed to render the variational matrix constant
/// (CLI exit code 4).
class TransformNotConstant : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Invalid arguments: out-of-domain inputs, bad configuration (exit code 2).
class DomainError : public Error {
 public:
  using Error::Error;
};

class ControlBoundViolated : public DomainError {
 public:
  using DomainError::DomainError;
};

class ConfigError : public DomainError {
 public:
  using DomainError::DomainError;
};

}  // namespace spiralctl
