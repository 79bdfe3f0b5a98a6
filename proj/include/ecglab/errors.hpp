#pragma once

#include <stdexcept>
#include <string>

namespace ecglab {

/// Raised when two group elements of different rank are combined.
class RankMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an enumeration, depth or memory cap would be exceeded.
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A boundary prefix is too short to determine a Busemann value.
class InsufficientDepth : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Rejection sampler acceptance rate fell below its floor.
class SamplerCollapse : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ecglab
