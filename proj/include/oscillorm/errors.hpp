#pragma once

#include <stdexcept>
#include <string>

namespace oscillorm {

// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// An evaluator produced a non-finite value.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double node)
      : Error(what + " (node " + std::to_string(node) + ")"), node_(node) {}
  double node() const noexcept { return node_; }

 private:
  double node_;
};

// Requested discretization cannot resolve the oscillation.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// Every start of a randomized estimator degenerated.
class EstimationError : public Error {
 public:
  using Error::Error;
};

// A test function has no grid node inside its support.
class DegenerateSupportError : public Error {
 public:
  using Error::Error;
};

class DegenerateStationaryError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace oscillorm
