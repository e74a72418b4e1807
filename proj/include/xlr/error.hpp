#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace xlr {

// Base for every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller violated an operation's precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Malformed structured data (JSON, journal lines, tool reports).
class ParseError : public Error {
 public:
  using Error::Error;
};

// The host environment cannot carry out the request: a toolchain binary is
// missing, a scratch directory cannot be created, and so on. Distinct from a
// program failing to compile.
class EnvironmentError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> diagnostics);

  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<std::string> diagnostics_;
};

class JournalError : public Error {
 public:
  using Error::Error;
};

}  // namespace xlr
