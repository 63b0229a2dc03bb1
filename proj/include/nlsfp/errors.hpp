#pragma once

#include <stdexcept>
#include <string>

namespace nlsfp {

/// Configuration / input-file problems. CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failures (integrator blow-up, solver divergence). CLI exit code 3.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown by flow_G when the monitored norm drift exceeds its bound.
class FlowError : public NumericError {
 public:
  explicit FlowError(const std::string& what, double drift = 0.0)
      : NumericError(what), norm_drift(drift) {}
  double norm_drift;
};

}  // namespace nlsfp
