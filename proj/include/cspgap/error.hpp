#pragma once

#include <stdexcept>
#include <string>

namespace cspgap {

/// Base of every error the toolkit throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented invariant (bad table length, repeated variable, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed file or literal.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// An enumeration would exceed the configured budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// A result failed its own exact re-verification. Never expected to fire.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace cspgap
