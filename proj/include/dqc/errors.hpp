#pragma once

#include <stdexcept>
#include <string>

namespace dqc {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller passed an out-of-range parameter or mismatched shapes.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A pipeline configuration is malformed or out of range.
class ConfigError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

/// Input text could not be turned into a numeric table.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Input file was empty (no data rows).
class EmptyInputError : public ParseError {
 public:
  using ParseError::ParseError;
};

/// File could not be opened or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine failed: non-convergence, norm drift, degenerate basis.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class DegenerateBasisError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// SVD entropy is undefined for a matrix without any nonzero singular value.
class UndefinedEntropyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace dqc
