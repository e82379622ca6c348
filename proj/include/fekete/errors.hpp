#pragma once

#include <stdexcept>
#include <string>

namespace fekete {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point, word or parameter does not satisfy an operation's precondition
/// (dimension mismatch, point outside an orthant, x < 2t, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Extended-real arithmetic hit an undefined form such as (+inf) + (-inf).
class IndeterminateForm : public Error {
 public:
  using Error::Error;
};

/// An oracle could not be evaluated at the requested point.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// A configured work cap (enumeration size, memo size, window) was exceeded.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

/// Malformed input file or configuration.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace fekete
