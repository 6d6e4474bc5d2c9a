#pragma once

#include <stdexcept>
#include <string>

namespace ddpopt {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input at which a quantity is undefined (zero splitting, both fields zero).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class BasisMismatchError : public Error {
 public:
  using Error::Error;
};

/// Step size fell below the representable resolution of the time axis.
class StiffnessError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

/// A branch-tracked square root could not be continued along a path.
class PathRefinementError : public Error {
 public:
  using Error::Error;
};

class LimitDivergenceError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Operation requires a capability the model does not provide
/// (e.g. complex-time evaluation).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ddpopt
