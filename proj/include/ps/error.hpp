#pragma once

#include <stdexcept>
#include <string>

namespace ps {

// Invalid data or invariant breach in an input artifact.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Unsatisfiable configuration or protocol precondition (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ps
