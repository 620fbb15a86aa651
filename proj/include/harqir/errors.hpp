// Exception taxonomy shared by all harqir modules.
#pragma once

#include <stdexcept>
#include <string>

namespace harqir {

/// Invalid argument values (out-of-domain inputs, broken invariants).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// |rho|^{2(k+delta-1)} reached 1 for some round: the conditional
/// decomposition and everything built on it is undefined.
class DegenerateCorrelationError : public DomainError {
 public:
  explicit DegenerateCorrelationError(const std::string& what) : DomainError(what) {}
};

/// Iterative scheme failed to reach its tolerance; carries the residual
/// actually achieved so callers can decide whether it is still usable.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what + " (achieved residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Discretization grid cannot represent the requested distribution.
class GridError : public std::runtime_error {
 public:
  explicit GridError(const std::string& what) : std::runtime_error(what) {}
};

/// Work or memory blow-up guard (e.g. weight-table enumeration cap).
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

/// Configuration file / CLI argument problems.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Design target cannot be met by any admissible parameter.
class InfeasibleTargetError : public std::runtime_error {
 public:
  explicit InfeasibleTargetError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace harqir
