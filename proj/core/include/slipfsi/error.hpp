#pragma once

#include <stdexcept>
#include <string>

namespace slipfsi {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an input argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A configuration field holds an invalid value. `field()` names it.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error("config field '" + field + "': " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A numerical stage failed (CFL violation, solver breakdown, lost invariant).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace slipfsi
