#include "sakkt/nlp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sakkt {

namespace {

std::string label(FunctionRole role, int index) {
  switch (role) {
    case FunctionRole::kObjective:
      return "f";
    case FunctionRole::kEquality:
      return "h_" + std::to_string(index);
    case FunctionRole::kInequality:
      return "g_" + std::to_string(index);
  }
  return "?";
}

[[noreturn]] void non_finite(FunctionRole role, int index, const char* what) {
  throw EvaluationError(to_string(role), role == FunctionRole::kObjective ? -1 : index,
                        "non-finite " + std::string(what) + " of " + label(role, index));
}

}  // namespace

std::string to_string(FunctionRole role) {
  switch (role) {
    case FunctionRole::kObjective:
      return "objective";
    case FunctionRole::kEquality:
      return "equality";
    case FunctionRole::kInequality:
      return "inequality";
  }
  return "?";
}

NlpProblem::NlpProblem(std::string name, int n, ScalarFunction objective,
                       std::vector<ScalarFunction> equalities,
                       std::vector<ScalarFunction> inequalities)
    : name_(std::move(name)),
      n_(n),
      objective_(std::move(objective)),
      equalities_(std::move(equalities)),
      inequalities_(std::move(inequalities)) {
  if (n_ <= 0) throw ContractViolation("problem dimension must be positive");
  auto complete = [](const ScalarFunction& fn) {
    return fn.value && fn.gradient && fn.hessian;
  };
  if (!complete(objective_) ||
      !std::all_of(equalities_.begin(), equalities_.end(), complete) ||
      !std::all_of(inequalities_.begin(), inequalities_.end(), complete)) {
    throw ContractViolation("problem '" + name_ + "' has a missing evaluator");
  }
}

const ScalarFunction& NlpProblem::function(FunctionRole role, int index) const {
  switch (role) {
    case FunctionRole::kObjective:
      return objective_;
    case FunctionRole::kEquality:
      if (index < 0 || index >= p()) throw ContractViolation("equality index out of range");
      return equalities_[index];
    case FunctionRole::kInequality:
      if (index < 0 || index >= m()) throw ContractViolation("inequality index out of range");
      return inequalities_[index];
  }
  throw ContractViolation("unknown function role");
}

void NlpProblem::check_point(const Vector& x) const {
  if (x.size() != n_) {
    std::ostringstream os;
    os << "point has dimension " << x.size() << ", problem '" << name_ << "' expects " << n_;
    throw ContractViolation(os.str());
  }
}

double NlpProblem::value(FunctionRole role, int index, const Vector& x) const {
  check_point(x);
  const double v = function(role, index).value(x);
  if (!std::isfinite(v)) non_finite(role, index, "value");
  return v;
}

Vector NlpProblem::gradient(FunctionRole role, int index, const Vector& x) const {
  check_point(x);
  Vector v = function(role, index).gradient(x);
  if (v.size() != n_) throw ContractViolation("gradient of " + label(role, index) + " has wrong size");
  if (!v.allFinite()) non_finite(role, index, "gradient");
  return v;
}

Matrix NlpProblem::hessian(FunctionRole role, int index, const Vector& x) const {
  check_point(x);
  Matrix v = function(role, index).hessian(x);
  if (v.rows() != n_ || v.cols() != n_) {
    throw ContractViolation("Hessian of " + label(role, index) + " has wrong shape");
  }
  if (!v.allFinite()) non_finite(role, index, "Hessian");
  return v;
}

double NlpProblem::f(const Vector& x) const { return value(FunctionRole::kObjective, 0, x); }
Vector NlpProblem::grad_f(const Vector& x) const { return gradient(FunctionRole::kObjective, 0, x); }
Matrix NlpProblem::hess_f(const Vector& x) const { return hessian(FunctionRole::kObjective, 0, x); }

Vector NlpProblem::h(const Vector& x) const {
  Vector out(p());
  for (int j = 0; j < p(); ++j) out[j] = value(FunctionRole::kEquality, j, x);
  return out;
}

Matrix NlpProblem::jac_h(const Vector& x) const {
  Matrix out(p(), n_);
  for (int j = 0; j < p(); ++j) out.row(j) = gradient(FunctionRole::kEquality, j, x).transpose();
  return out;
}

Matrix NlpProblem::hess_h(int j, const Vector& x) const {
  return hessian(FunctionRole::kEquality, j, x);
}

Vector NlpProblem::g(const Vector& x) const {
  Vector out(m());
  for (int i = 0; i < m(); ++i) out[i] = value(FunctionRole::kInequality, i, x);
  return out;
}

Matrix NlpProblem::jac_g(const Vector& x) const {
  Matrix out(m(), n_);
  for (int i = 0; i < m(); ++i) out.row(i) = gradient(FunctionRole::kInequality, i, x).transpose();
  return out;
}

Matrix NlpProblem::hess_g(int i, const Vector& x) const {
  return hessian(FunctionRole::kInequality, i, x);
}

namespace {

void check_multipliers(const NlpProblem& problem, const KktTriple& t) {
  if (t.mu.size() != problem.p() || t.omega.size() != problem.m()) {
    throw ContractViolation("multiplier dimensions do not match problem '" + problem.name() + "'");
  }
}

}  // namespace

Vector lagrangian_gradient(const NlpProblem& problem, const KktTriple& t) {
  check_multipliers(problem, t);
  Vector grad = problem.grad_f(t.x);
  for (int j = 0; j < problem.p(); ++j) grad += t.mu[j] * problem.gradient(FunctionRole::kEquality, j, t.x);
  for (int i = 0; i < problem.m(); ++i) {
    grad += t.omega[i] * problem.gradient(FunctionRole::kInequality, i, t.x);
  }
  return grad;
}

Matrix lagrangian_hessian(const NlpProblem& problem, const KktTriple& t) {
  check_multipliers(problem, t);
  Matrix hess = problem.hess_f(t.x);
  for (int j = 0; j < problem.p(); ++j) hess += t.mu[j] * problem.hess_h(j, t.x);
  for (int i = 0; i < problem.m(); ++i) hess += t.omega[i] * problem.hess_g(i, t.x);
  return hess;
}

std::vector<int> active_set(const NlpProblem& problem, const Vector& x, double tol_act) {
  if (tol_act < 0.0) throw ContractViolation("active-set tolerance must be nonnegative");
  std::vector<int> active;
  const Vector g = problem.g(x);
  for (int i = 0; i < problem.m(); ++i) {
    if (g[i] >= -tol_act) active.push_back(i);
  }
  return active;
}

FeasibilityMeasure feasibility(const NlpProblem& problem, const Vector& x) {
  const Vector h = problem.h(x);
  const Vector viol = problem.g(x).cwiseMax(0.0);
  FeasibilityMeasure out;
  out.eq_sq_sum = h.squaredNorm();
  out.eq_norm = std::sqrt(out.eq_sq_sum);
  out.ineq_norm = viol.norm();
  out.ineq_viol_sum = viol.sum();
  return out;
}

DerivativeReport check_derivatives(const NlpProblem& problem, const Vector& x, double fd_step) {
  if (!(fd_step > 0.0)) throw ContractViolation("finite-difference step must be positive");
  const int n = problem.n();
  DerivativeReport report;

  auto check_one = [&](FunctionRole role, int index) {
    const Vector grad = problem.gradient(role, index, x);
    const Matrix hess = problem.hessian(role, index, x);
    Vector fd_grad(n);
    Matrix fd_hess(n, n);
    for (int c = 0; c < n; ++c) {
      Vector xp = x;
      Vector xm = x;
      xp[c] += fd_step;
      xm[c] -= fd_step;
      fd_grad[c] = (problem.value(role, index, xp) - problem.value(role, index, xm)) / (2.0 * fd_step);
      fd_hess.col(c) = (problem.gradient(role, index, xp) - problem.gradient(role, index, xm)) / (2.0 * fd_step);
    }
    const double grad_scale = std::max(1.0, grad.lpNorm<Eigen::Infinity>());
    const double hess_scale = std::max(1.0, hess.lpNorm<Eigen::Infinity>());
    DerivativeCheckEntry entry{role, index,
                               (grad - fd_grad).lpNorm<Eigen::Infinity>() / grad_scale,
                               (hess - fd_hess).lpNorm<Eigen::Infinity>() / hess_scale};
    report.max_gradient_error = std::max(report.max_gradient_error, entry.gradient_error);
    report.max_hessian_error = std::max(report.max_hessian_error, entry.hessian_error);
    report.entries.push_back(entry);
  };

  check_one(FunctionRole::kObjective, 0);
  for (int j = 0; j < problem.p(); ++j) check_one(FunctionRole::kEquality, j);
  for (int i = 0; i < problem.m(); ++i) check_one(FunctionRole::kInequality, i);
  return report;
}

}  // namespace sakkt
