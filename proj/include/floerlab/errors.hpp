#pragma once

#include <stdexcept>
#include <string>

namespace floerlab {

/// Level exponent outside {-1} ∪ [0, 2], or outside the range an operation accepts.
class LevelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Ambient dimension or truncation order of two operands disagree.
class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Coefficients violate coeff(-k) = conj(coeff(k)) or contain non-finite entries.
class InvalidLoop : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Sampling grid too coarse for alias-free evaluation.
class AliasingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A loop sample left the domain of a chart.
class OutOfChartError : public std::domain_error {
 public:
  OutOfChartError(const std::string& what, int node) : std::domain_error(what), node_(node) {}
  int node() const noexcept { return node_; }

 private:
  int node_;
};

class MissingInverse : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class EmptyOverlap : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Operation requires a symmetric (level-0 self-adjoint) operator.
class AsymmetricOperator : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace floerlab
