#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace sakkt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A caller broke a documented precondition (bad dimensions, negative
/// multipliers, out-of-range parameters).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A problem evaluator produced a non-finite value.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& function, int index, const std::string& what)
      : std::runtime_error(what), function_(function), index_(index) {}

  const std::string& function() const { return function_; }
  /// Constraint index (0-based), or -1 for the objective.
  int index() const { return index_; }

 private:
  std::string function_;
  int index_;
};

class NotFoundError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Requested problem size exceeds what a routine supports.
class UnsupportedScale : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace sakkt
