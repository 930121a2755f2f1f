#pragma once

#include <stdexcept>
#include <string>

namespace glt {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad or missing configuration (unknown registry name, empty ladder, missing extent data).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A configured size cap was exceeded.
class SizeLimitError : public Error {
 public:
  using Error::Error;
};

/// Operand shapes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A grid that should be contained in another is not.
class ContainmentError : public Error {
 public:
  using Error::Error;
};

/// Domains of two operands differ or a domain precondition fails.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A sampled function returned a non-finite value.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// Matrix input violates a precondition (e.g. asymmetric input to a symmetric solver).
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace glt
