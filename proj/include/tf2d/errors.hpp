#pragma once

#include <stdexcept>
#include <string>

namespace tf2d {

/// Invalid argument, size mismatch or violated precondition on inputs.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// NaN/Inf encountered where finite values are required.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Kernel evaluated on (or numerically at) its diagonal singularity.
class SingularityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Input violates a documented mathematical precondition of a check.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Iterative solver did not converge.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A series or sum could not be terminated within its cap.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A singular potential does not satisfy its declared singularity bound.
class CertificateError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace tf2d
