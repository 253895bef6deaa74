#pragma once

#include <stdexcept>
#include <string>

namespace actconv {

/// Argument outside the mathematical domain of a function (non-finite x,
/// x below the envelope's validity range, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An estimate hypothesis or operation precondition does not hold.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical integration did not meet its tolerance within the subdivision
/// budget. The message carries the operator context.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace actconv
