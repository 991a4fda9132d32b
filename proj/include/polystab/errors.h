#pragma once

#include <stdexcept>
#include <string>

namespace polystab {

/// Dimension or variable-count mismatch.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A monomial of Z(x) is not divisible by any entry of Ẑ(x).
class FactorizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inconsistent user configuration (missing bounds, wrong method, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed data or interchange file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical integration escaped the divergence threshold.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// The linear equality system of an SDP is inconsistent before any solve.
class StructuralInfeasibility : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A solved P is too ill-conditioned to invert reliably.
class IllConditionedCertificate : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace polystab
