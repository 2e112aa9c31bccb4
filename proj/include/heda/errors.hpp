#pragma once

#include <stdexcept>
#include <string>

namespace heda {

// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Operands belong to different keys or different schemes.
struct KeyMismatchError : Error {
  using Error::Error;
};

// Fixed-point scale ledgers disagree where they must match.
struct ScaleMismatchError : Error {
  using Error::Error;
};

// Vector or matrix dimensions disagree.
struct DimensionError : Error {
  using Error::Error;
};

// A value falls outside the range a precondition demands.
struct RangeError : Error {
  using Error::Error;
};

// Bad parameter to a key generator, protocol, or trainer.
struct ParamError : Error {
  using Error::Error;
};

// Malformed input file (CSV, JSON key file, config).
struct ParseError : Error {
  using Error::Error;
};

}  // namespace heda
