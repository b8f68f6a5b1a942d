#pragma once

#include <stdexcept>
#include <string>

namespace seirs {

/// Input outside the domain Δ_{0,K} of an incidence function, or an
/// otherwise invalid argument to a numerical routine.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Numerical failure: integration drift, blow-up, non-convergent limits.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

class IntegrationError : public NumericalError {
 public:
  explicit IntegrationError(const std::string& what) : NumericalError(what) {}
};

class NonConvergence : public NumericalError {
 public:
  explicit NonConvergence(const std::string& what) : NumericalError(what) {}
};

/// Configuration schema violation. `path()` names the offending section.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& reason)
      : std::runtime_error(path + ": " + reason), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace seirs
