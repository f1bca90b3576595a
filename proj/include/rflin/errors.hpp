#pragma once

#include <stdexcept>
#include <string>

namespace rflin {

// Base for everything this library throws on purpose. Callers that do not
// care about the category can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Vector or matrix extent does not match the object it is applied to.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// A feature vector exceeds the unit-norm bound it is required to satisfy.
class NormViolation : public Error {
 public:
  using Error::Error;
};

// Malformed argument values (length mismatches, empty required inputs, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// A model object fails one of its structural invariants.
class InvalidModel : public Error {
 public:
  using Error::Error;
};

// A scalar configuration value is outside its allowed range.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

// A policy was asked for an action at a (level, state) it does not define.
class IncompletePolicy : public Error {
 public:
  using Error::Error;
};

// A reward function was asked for a (level, state, action) it does not cover.
class MissingReward : public Error {
 public:
  using Error::Error;
};

// An internal quantity left the range its contract promises.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// An exploration procedure used more episodes than it was granted.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

// A feature vector is not representable in the selected feature basis.
class SpanViolation : public Error {
 public:
  using Error::Error;
};

// A randomized construction failed to produce a valid object within its
// resource cap.
class ConstructionFailure : public Error {
 public:
  using Error::Error;
};

// Text input could not be parsed; the message names the offending line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, long line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  explicit ParseError(const std::string& what) : Error(what), line_(0) {}
  long line() const { return line_; }

 private:
  long line_;
};

}  // namespace rflin
