#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace severfit {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// No observation fell inside the moment window.
class EmptyWindow : public std::runtime_error {
 public:
  explicit EmptyWindow(const std::string& what, std::size_t window = 0)
      : std::runtime_error(what), window_(window) {}
  std::size_t window() const noexcept { return window_; }

 private:
  std::size_t window_;
};

// Data or model collapses to a point where the requested quantity is undefined
// (all-zero sample, zero-probability window, zero efficiency).
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Quadrature or iterative routine failed to reach its tolerance.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

class SolverStall : public NumericError {
 public:
  using NumericError::NumericError;
};

// Inconsistent configuration (e.g. method/model combination, malformed config file).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace severfit
