#pragma once

#include <stdexcept>
#include <string>

namespace semconf {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments or configuration. The CLI maps these to exit code 1.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Input data violates a schema or a precondition. The CLI maps these to exit
// code 2.
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace semconf
