#pragma once

#include <stdexcept>
#include <string>

namespace calogero {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input or violated precondition.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Argument at a pole of the gamma function (or of a ratio built from it).
class PoleError : public Error {
 public:
  using Error::Error;
};

/// Series or quadrature that failed to converge, or a root bracket that could not be established.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace calogero
