#pragma once

#include <stdexcept>
#include <string>

namespace filmnet {

/// Malformed or semantically invalid graph description.
class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration parse or validation failure. `path()` names the offending
/// field (e.g. "initial.edges.e2") when one is known.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& message, std::string path = {})
      : std::runtime_error(path.empty() ? message : path + ": " + message),
        path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Solver failure: non-finite state, step-size underflow, singular system.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace filmnet
