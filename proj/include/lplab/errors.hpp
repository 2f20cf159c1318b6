#pragma once

#include <stdexcept>
#include <string>

namespace lplab {

/// Invalid grid, solver or command configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of an operation (p < 1, q < p, invalid exponent triple).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Dyadic block index that the grid cannot resolve.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Fields living on different grids or with incompatible component counts.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical precondition (divergence-free input, mean-zero vorticity, ...) is violated.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A requested frequency split needs more dyadic blocks than the grid holds.
class ResolutionError : public std::range_error {
 public:
  using std::range_error::range_error;
};

/// Time integration aborted (CFL violation or non-finite state).
class NumericalAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lplab
