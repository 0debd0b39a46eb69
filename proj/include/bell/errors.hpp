#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bell {

/// A strategy tried to use information its party cannot have, or a
/// signaling strategy was run with enforcement on.
class StructuralViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid experiment configuration or strategy parameters.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed config or log text. line() is 1-based; 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// The spacetime audit needs geometry and timestamps the log lacks.
class AuditInapplicable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bell
