#pragma once

#include <stdexcept>
#include <string>

namespace pgeom {

/// Broad failure categories. The CLI maps these onto exit codes.
enum class ErrorKind {
  invalid_input,  // bad arguments or geometry outside an operation's domain
  config,         // malformed configuration file
  numerical,      // integrator, quadrature or tolerance failure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidInput : public Error {
 public:
  explicit InvalidInput(const std::string& what)
      : Error(ErrorKind::invalid_input, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorKind::config, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorKind::numerical, what) {}
};

}  // namespace pgeom
