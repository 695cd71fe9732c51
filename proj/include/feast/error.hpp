#pragma once

#include <stdexcept>
#include <string>

namespace feast {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Byte payload does not decode as a stream (bad length, bad ordering).
class MalformedStreamError : public Error {
 public:
  using Error::Error;
};

/// A coordinate, timestamp or index falls outside its representable range.
class OutOfRangeError : public Error {
 public:
  using Error::Error;
};

/// An event arrived with a timestamp older than the one stored at its pixel.
class TimeRegressionError : public Error {
 public:
  using Error::Error;
};

/// Invalid user-supplied parameter (non-positive tau, even window, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Two objects that must share a shape do not.
class ShapeMismatchError : public Error {
 public:
  using Error::Error;
};

/// Input for which the requested quantity is undefined (e.g. Gini of zeros).
class UndefinedInputError : public Error {
 public:
  using Error::Error;
};

/// An internal invariant was violated; indicates a bug or misuse of ordering.
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// Configuration key missing, unknown or unparsable. Message starts with the key path.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : Error(key + ": " + what), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace feast
