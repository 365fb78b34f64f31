#pragma once

#include <stdexcept>
#include <string>

namespace delaysl {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

/// The function being counted vanishes (numerically) on the contour.
class ZeroOnBoundary : public Error {
 public:
  using Error::Error;
};

/// Adaptive boundary refinement did not resolve the phase.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Every eigenvalue of the discretized operator is numerically zero.
class DegenerateOperator : public Error {
 public:
  using Error::Error;
};

/// A claimed eigen-relation does not hold within tolerance.
class InconsistentPair : public Error {
 public:
  using Error::Error;
};

}  // namespace delaysl
