#include "sakkt/penalty.hpp"

#include <cmath>

#include "outer_common.hpp"

namespace sakkt {

double phi(const NlpProblem& problem, double rho, const Vector& x) {
  if (!(rho > 0.0)) throw ContractViolation("penalty parameter must be positive");
  const Vector viol = problem.g(x).cwiseMax(0.0);
  return problem.f(x) + 0.5 * rho * problem.h(x).squaredNorm() +
         0.25 * rho * viol.array().pow(4).sum();
}

Vector phi_grad(const NlpProblem& problem, double rho, const Vector& x) {
  if (!(rho > 0.0)) throw ContractViolation("penalty parameter must be positive");
  Vector grad = problem.grad_f(x);
  const Vector h = problem.h(x);
  for (int j = 0; j < problem.p(); ++j) {
    grad += rho * h[j] * problem.gradient(FunctionRole::kEquality, j, x);
  }
  const Vector g = problem.g(x);
  for (int i = 0; i < problem.m(); ++i) {
    if (g[i] <= 0.0) continue;
    grad += rho * std::pow(g[i], 3) * problem.gradient(FunctionRole::kInequality, i, x);
  }
  return grad;
}

Matrix phi_hess(const NlpProblem& problem, double rho, const Vector& x) {
  if (!(rho > 0.0)) throw ContractViolation("penalty parameter must be positive");
  Matrix hess = problem.hess_f(x);
  const Vector h = problem.h(x);
  for (int j = 0; j < problem.p(); ++j) {
    const Vector dh = problem.gradient(FunctionRole::kEquality, j, x);
    hess += rho * h[j] * problem.hess_h(j, x) + rho * dh * dh.transpose();
  }
  const Vector g = problem.g(x);
  for (int i = 0; i < problem.m(); ++i) {
    if (g[i] <= 0.0) continue;
    const Vector dg = problem.gradient(FunctionRole::kInequality, i, x);
    hess += rho * std::pow(g[i], 3) * problem.hess_g(i, x) +
            3.0 * rho * g[i] * g[i] * dg * dg.transpose();
  }
  return hess;
}

SmoothFunctionOracle penalty_oracle(const NlpProblem& problem, double rho) {
  return {[&problem, rho](const Vector& x) { return phi(problem, rho, x); },
          [&problem, rho](const Vector& x) { return phi_grad(problem, rho, x); },
          [&problem, rho](const Vector& x) { return phi_hess(problem, rho, x); }};
}

Multipliers recover_multipliers(const NlpProblem& problem, double rho, const Vector& x) {
  if (!(rho > 0.0)) throw ContractViolation("penalty parameter must be positive");
  Multipliers out;
  out.mu = rho * problem.h(x);
  out.omega = rho * problem.g(x).cwiseMax(0.0).array().pow(3).matrix();
  return out;
}

void PenaltyParams::validate(const NlpProblem& problem) const {
  if (!(eps.initial > 0.0) || !(eps.factor > 0.0 && eps.factor < 1.0)) {
    throw ContractViolation("eps schedule needs eps0 > 0 and 0 < theta < 1");
  }
  if (!(rho.initial > 0.0) || !(rho.factor > 1.0)) {
    throw ContractViolation("rho schedule needs rho0 > 0 and gamma > 1");
  }
  if (max_outer < 1) throw ContractViolation("max_outer must be at least 1");
  if (x0.size() != problem.n()) throw ContractViolation("x0 has wrong dimension");
  if (!(stop_tol > 0.0)) throw ContractViolation("stop tolerance must be positive");
}

namespace {

SolverTrace start_trace(const NlpProblem& problem, const PenaltyParams& params,
                        const std::string& method) {
  SolverTrace trace;
  trace.problem = problem.name();
  trace.method = method;
  trace.params = {{"eps0", params.eps.initial},   {"theta", params.eps.factor},
                  {"rho0", params.rho.initial},   {"gamma", params.rho.factor},
                  {"max_outer", params.max_outer}, {"stop_tol", params.stop_tol}};
  trace.vectors["x0"] = params.x0;
  return trace;
}

// One outer loop; `modified` switches on the warm-start/reset rule.
SolverTrace run_penalty(const NlpProblem& problem, const PenaltyParams& params, bool modified) {
  params.validate(problem);
  SolverTrace trace = start_trace(problem, params, modified ? "penalty-warm" : "penalty");

  double f_x0 = 0.0;
  if (modified) {
    const FeasibilityMeasure feas0 = feasibility(problem, params.x0);
    if (feas0.eq_norm > 1e-10 || feas0.ineq_norm > 1e-10) {
      throw ContractViolation("modified penalty method needs a feasible x0");
    }
    f_x0 = problem.f(params.x0);
    trace.params["f_x0"] = f_x0;
  }

  Vector start = params.x0;
  trace.status = TraceStatus::kMaxOuter;
  for (int k = 0; k < params.max_outer; ++k) {
    const double rho = params.rho.at(k);
    const double eps = params.eps.at(k);

    TrustRegionResult tr;
    try {
      tr = minimize_second_order(penalty_oracle(problem, rho), start, eps, params.inner);
    } catch (const EvaluationError& e) {
      trace.status = TraceStatus::kFailed;
      trace.message = "outer iteration " + std::to_string(k) + ": " + e.what();
      break;
    }

    const std::string overflow = detail::overflow_diagnostic(rho, problem.g(tr.x_final));
    if (!overflow.empty()) {
      trace.status = TraceStatus::kFailed;
      trace.message = "outer iteration " + std::to_string(k) + ": " + overflow;
      break;
    }

    TraceRecord rec = detail::make_record(problem, k, tr.x_final,
                                          recover_multipliers(problem, rho, tr.x_final), eps, rho);
    rec.inner = detail::inner_stats(tr);
    rec.extra["f"] = problem.f(rec.x);
    rec.extra["merit"] = tr.value;

    if (modified) {
      const double next_rho = params.rho.at(k + 1);
      const double next_merit = rec.extra["f"] + 0.5 * next_rho * rec.feasibility.eq_sq_sum +
                                0.25 * next_rho * problem.g(rec.x).cwiseMax(0.0).array().pow(4).sum();
      rec.extra["next_merit"] = next_merit;
      rec.branch = next_merit <= f_x0 ? StartBranch::kWarm : StartBranch::kReset;
      start = rec.branch == StartBranch::kWarm ? rec.x : params.x0;
      if (tr.value > f_x0) rec.flags.push_back("merit_above_f_x0");
    } else {
      start = rec.x;
    }

    if (tr.status == TrustRegionStatus::kPrecisionLimit) rec.flags.push_back("inner_precision_limit");
    if (tr.status == TrustRegionStatus::kIterationLimit || tr.status == TrustRegionStatus::kStalled) {
      rec.flags.push_back("inner_failed");
      trace.records.push_back(std::move(rec));
      trace.status = TraceStatus::kFailed;
      trace.message = "outer iteration " + std::to_string(k) + ": inner solver " + to_string(tr.status);
      break;
    }

    const bool done = detail::stop_test(problem, rec, params.stop_tol, params.tol_act);
    trace.records.push_back(std::move(rec));
    if (done) {
      trace.status = TraceStatus::kConverged;
      break;
    }
  }
  return trace;
}

}  // namespace

SolverTrace run_basic(const NlpProblem& problem, const PenaltyParams& params) {
  return run_penalty(problem, params, false);
}

SolverTrace run_modified(const NlpProblem& problem, const PenaltyParams& params) {
  return run_penalty(problem, params, true);
}

}  // namespace sakkt
