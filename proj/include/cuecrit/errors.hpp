#pragma once

#include <stdexcept>
#include <string>

namespace cuecrit {

// Base of every error thrown by the library. The CLI maps each subclass to
// an exit code (see tools/cuecrit.cpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class PoleError : public Error {
 public:
  using Error::Error;
};

class CapabilityError : public Error {
 public:
  using Error::Error;
};

class ResolutionError : public Error {
 public:
  using Error::Error;
};

class StatisticsError : public Error {
 public:
  using Error::Error;
};

// Iterative solver failed to converge. `worst` carries the diagnostic the
// solver tracks (largest residual or subdiagonal), `iterations` the sweeps spent.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double worst, int iterations)
      : Error(what), worst_(worst), iterations_(iterations) {}

  double worst() const { return worst_; }
  int iterations() const { return iterations_; }

 private:
  double worst_;
  int iterations_;
};

}  // namespace cuecrit
