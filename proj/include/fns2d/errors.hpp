#pragma once

#include <stdexcept>
#include <string>

namespace fns2d {

// Bad arguments: parameter out of range, mismatched cutoffs, grid too coarse.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A grid of M points cannot represent the requested modes without aliasing.
class AliasingError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

// Something numerical went wrong that the caller cannot fix by retrying:
// failed factorisation, quadrature budget exhausted, overflow.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw PreconditionError(what);
}

}  // namespace fns2d
