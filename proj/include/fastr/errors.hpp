#pragma once

#include <stdexcept>
#include <string>

namespace fastr {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands whose dimensions do not agree (tensor dims, vector lengths, modes).
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Argument outside its documented domain (negative lambda, k < 2, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Non-finite values or a failed factorization.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Coefficient error against an all-zero ground truth is undefined.
class ZeroNormError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Malformed or unreadable file.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace fastr
