#pragma once

#include <stdexcept>
#include <string>

namespace wolbopt {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or non-finite user input.
class InputError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Violated modelling assumption (parameter relations, missing root).
class AssumptionError : public Error {
 public:
  using Error::Error;
};

// Discretization cannot be run as configured (CFL).
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

// Subsolution support does not fit inside the domain.
class GeometryError : public Error {
 public:
  using Error::Error;
};

// Non-finite values produced by a solver.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace wolbopt
