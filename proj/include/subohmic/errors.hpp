#pragma once

#include <stdexcept>
#include <string>

namespace subohmic {

// Input outside the mathematical or physical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An iterative method failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// A root search was started on an interval without a sign change.
class BracketError : public DomainError {
 public:
  using DomainError::DomainError;
};

}  // namespace subohmic
