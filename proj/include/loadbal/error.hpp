#pragma once

#include <stdexcept>
#include <string>

namespace loadbal {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: non-positive speed or size, bad permutation, bad config.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Reference to something that does not exist in the current state,
// e.g. an unknown machine id or a choice with every price infinite.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// A mechanism precondition that should have been maintained did not hold.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace loadbal
