#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sakkt/types.hpp"

namespace sakkt {

/// A twice continuously differentiable map R^n -> R with analytic
/// derivatives. Hessians must be symmetric.
struct ScalarFunction {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  std::function<Matrix(const Vector&)> hessian;
};

enum class FunctionRole { kObjective, kEquality, kInequality };

std::string to_string(FunctionRole role);

/**
 * minimize f(x) subject to h_j(x) = 0 (j < p), g_i(x) <= 0 (i < m).
 *
 * Every evaluator call validates the dimension of x and of the returned
 * object, and throws EvaluationError on non-finite output.
 */
class NlpProblem {
 public:
  NlpProblem(std::string name, int n, ScalarFunction objective,
             std::vector<ScalarFunction> equalities = {},
             std::vector<ScalarFunction> inequalities = {});

  const std::string& name() const { return name_; }
  int n() const { return n_; }
  int p() const { return static_cast<int>(equalities_.size()); }
  int m() const { return static_cast<int>(inequalities_.size()); }

  double f(const Vector& x) const;
  Vector grad_f(const Vector& x) const;
  Matrix hess_f(const Vector& x) const;

  Vector h(const Vector& x) const;
  /// p x n, row j is grad h_j(x).
  Matrix jac_h(const Vector& x) const;
  Matrix hess_h(int j, const Vector& x) const;

  Vector g(const Vector& x) const;
  /// m x n, row i is grad g_i(x).
  Matrix jac_g(const Vector& x) const;
  Matrix hess_g(int i, const Vector& x) const;

  double value(FunctionRole role, int index, const Vector& x) const;
  Vector gradient(FunctionRole role, int index, const Vector& x) const;
  Matrix hessian(FunctionRole role, int index, const Vector& x) const;

 private:
  const ScalarFunction& function(FunctionRole role, int index) const;
  void check_point(const Vector& x) const;

  std::string name_;
  int n_;
  ScalarFunction objective_;
  std::vector<ScalarFunction> equalities_;
  std::vector<ScalarFunction> inequalities_;
};

/// A primal point with equality multipliers mu and inequality multipliers
/// omega >= 0.
struct KktTriple {
  Vector x;
  Vector mu;
  Vector omega;
};

struct FeasibilityMeasure {
  double eq_norm = 0.0;        // ||h(x)||
  double ineq_norm = 0.0;      // ||max{0, g(x)}||
  double eq_sq_sum = 0.0;      // sum_j h_j(x)^2
  double ineq_viol_sum = 0.0;  // sum_i max{0, g_i(x)}

  bool operator==(const FeasibilityMeasure&) const = default;
};

/// grad f + sum_j mu_j grad h_j + sum_i omega_i grad g_i.
Vector lagrangian_gradient(const NlpProblem& problem, const KktTriple& t);

/// hess f + sum_j mu_j hess h_j + sum_i omega_i hess g_i.
Matrix lagrangian_hessian(const NlpProblem& problem, const KktTriple& t);

/// {i : g_i(x) >= -tol_act}, ascending. tol_act = 0 gives the exact active set.
std::vector<int> active_set(const NlpProblem& problem, const Vector& x, double tol_act);

FeasibilityMeasure feasibility(const NlpProblem& problem, const Vector& x);

struct DerivativeCheckEntry {
  FunctionRole role;
  int index;
  double gradient_error;
  double hessian_error;
};

struct DerivativeReport {
  std::vector<DerivativeCheckEntry> entries;
  double max_gradient_error = 0.0;
  double max_hessian_error = 0.0;

  double worst() const { return std::max(max_gradient_error, max_hessian_error); }
};

/**
 * Compares analytic gradients and Hessians of every function in the problem
 * against central differences with step fd_step. Gradients are differenced
 * from values, Hessians from analytic gradients. Errors are
 * ||analytic - fd||_inf / max(1, ||analytic||_inf).
 */
DerivativeReport check_derivatives(const NlpProblem& problem, const Vector& x, double fd_step);

}  // namespace sakkt
