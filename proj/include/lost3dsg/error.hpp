#pragma once

#include <stdexcept>
#include <string>

namespace lost3dsg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad documents, violated preconditions, schema errors.
/// The CLI maps these to exit status 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Failure of an external provider (remote embedder transport or status).
class ProviderError : public Error {
 public:
  using Error::Error;
};

}  // namespace lost3dsg
