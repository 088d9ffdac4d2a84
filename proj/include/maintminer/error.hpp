#pragma once

#include <stdexcept>
#include <string>

namespace maintminer {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Violated argument precondition (length mismatch, inverted range, ...).
class ArgError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failure; the message carries the offending path.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace maintminer
