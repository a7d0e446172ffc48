#pragma once

#include <stdexcept>
#include <string>

namespace leafattack {

enum class ErrorKind {
  InvalidInput,
  InvalidParameter,
  Placement,
  Io,
  NoContour,
  MaskGeneration,
  ModelLoad,
  Patch,
  UndefinedPercent,
  Config,
};

const char* to_string(ErrorKind kind) noexcept;

// Single exception type for the library; `kind()` lets callers (notably the
// CLI exit-code mapping) dispatch without a class hierarchy.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace leafattack
