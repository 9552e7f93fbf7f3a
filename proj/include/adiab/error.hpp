#pragma once

#include <stdexcept>
#include <string>

namespace adiab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GridMismatch : public Error {
 public:
  GridMismatch() : Error("fields live on different grids") {}
};

class DomainError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver gave up; carries the last residual norm.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Spectral gap of the tracked eigenvalue fell below the admissible minimum.
class GapError : public Error {
 public:
  GapError(const std::string& what, double t) : Error(what), time_(t) {}
  double time() const { return time_; }

 private:
  double time_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace adiab
