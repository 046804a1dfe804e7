#pragma once

#include <stdexcept>
#include <string>

namespace mixlab {

/// Invalid user input: malformed file, bad flag combination, schedule violation.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// An operation precondition failed (the message names the violated inequality).
class PreconditionError : public std::runtime_error {
 public:
  explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

/// A configured budget (height, run count, memory) would be exceeded.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

/// An estimator could not reach its target within the configured caps
/// while running in strict mode.
class EstimatorError : public std::runtime_error {
 public:
  explicit EstimatorError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mixlab
