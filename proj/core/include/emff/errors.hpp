#pragma once

#include <stdexcept>
#include <string>

namespace emff {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller supplied an input outside an operation's domain.
class InputError : public Error {
 public:
  using Error::Error;
};

class ZeroSeparationError : public InputError {
 public:
  using InputError::InputError;
};

/// A numerical procedure failed to produce a certified answer.
class NumericError : public Error {
 public:
  using Error::Error;
};

class RecoveryError : public NumericError {
 public:
  using NumericError::NumericError;
};

class GapViolationError : public NumericError {
 public:
  using NumericError::NumericError;
};

class NoFeasiblePointError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace emff
