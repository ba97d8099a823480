#pragma once

#include <stdexcept>
#include <string>

namespace avglab {

// Base class for every error raised by the library. The CLI maps these to
// exit status 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition or domain-type invariant was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// The working precision needed for a certified result exceeds the memory
// budget. `required_bits` is the precision that would have been needed.
class PrecisionBudgetExceeded : public Error {
 public:
  PrecisionBudgetExceeded(const std::string& what, long long required_bits)
      : Error(what), required_bits_(required_bits) {}
  long long required_bits() const noexcept { return required_bits_; }

 private:
  long long required_bits_;
};

// A numerical procedure could not reach the requested accuracy.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace avglab
