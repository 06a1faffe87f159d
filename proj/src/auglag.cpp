#include "sakkt/auglag.hpp"

#include <algorithm>
#include <cmath>

#include "outer_common.hpp"

namespace sakkt {

namespace {

void check_arguments(const NlpProblem& problem, double rho, const Vector& mu, const Vector& omega) {
  if (!(rho > 0.0)) throw ContractViolation("penalty parameter must be positive");
  if (mu.size() != problem.p() || omega.size() != problem.m()) {
    throw ContractViolation("multiplier dimensions do not match the problem");
  }
  if (omega.size() > 0 && omega.minCoeff() < 0.0) {
    throw ContractViolation("inequality multipliers must be nonnegative");
  }
}

// max{0, g_i(x) + omega_i/rho}
Vector shifted_violation(const NlpProblem& problem, double rho, const Vector& omega, const Vector& x) {
  return (problem.g(x) + omega / rho).cwiseMax(0.0);
}

double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

}  // namespace

double auglag_value(const NlpProblem& problem, double rho, const Vector& mu, const Vector& omega,
                    const Vector& x) {
  check_arguments(problem, rho, mu, omega);
  const Vector shifted_eq = problem.h(x) + mu / rho;
  const Vector s = shifted_violation(problem, rho, omega, x);
  return problem.f(x) + 0.5 * rho * shifted_eq.squaredNorm() + 0.25 * rho * s.array().pow(4).sum();
}

Vector auglag_grad(const NlpProblem& problem, double rho, const Vector& mu, const Vector& omega,
                   const Vector& x) {
  check_arguments(problem, rho, mu, omega);
  Vector grad = problem.grad_f(x);
  const Vector h = problem.h(x);
  for (int j = 0; j < problem.p(); ++j) {
    grad += (mu[j] + rho * h[j]) * problem.gradient(FunctionRole::kEquality, j, x);
  }
  const Vector s = shifted_violation(problem, rho, omega, x);
  for (int i = 0; i < problem.m(); ++i) {
    if (s[i] == 0.0) continue;
    grad += rho * std::pow(s[i], 3) * problem.gradient(FunctionRole::kInequality, i, x);
  }
  return grad;
}

Matrix auglag_hess(const NlpProblem& problem, double rho, const Vector& mu, const Vector& omega,
                   const Vector& x) {
  check_arguments(problem, rho, mu, omega);
  Matrix hess = problem.hess_f(x);
  const Vector h = problem.h(x);
  for (int j = 0; j < problem.p(); ++j) {
    const Vector dh = problem.gradient(FunctionRole::kEquality, j, x);
    hess += (mu[j] + rho * h[j]) * problem.hess_h(j, x) + rho * dh * dh.transpose();
  }
  const Vector s = shifted_violation(problem, rho, omega, x);
  for (int i = 0; i < problem.m(); ++i) {
    if (s[i] == 0.0) continue;
    const Vector dg = problem.gradient(FunctionRole::kInequality, i, x);
    hess += rho * std::pow(s[i], 3) * problem.hess_g(i, x) + 3.0 * rho * s[i] * s[i] * dg * dg.transpose();
  }
  return hess;
}

Multipliers internal_multipliers(const NlpProblem& problem, double rho, const Vector& mu,
                                 const Vector& omega, const Vector& x) {
  check_arguments(problem, rho, mu, omega);
  Multipliers out;
  out.mu = mu + rho * problem.h(x);
  out.omega = rho * shifted_violation(problem, rho, omega, x).array().pow(3).matrix();
  return out;
}

void AugLagParams::validate(const NlpProblem& problem) const {
  if (!(mu_min < mu_max)) throw ContractViolation("need mu_min < mu_max");
  if (!(omega_max > 0.0)) throw ContractViolation("need omega_max > 0");
  if (!(gamma > 1.0)) throw ContractViolation("need gamma > 1");
  if (!(rho_1 > 0.0)) throw ContractViolation("need rho_1 > 0");
  if (!(tau > 0.0 && tau < 1.0)) throw ContractViolation("need 0 < tau < 1");
  if (!(eps.initial > 0.0) || !(eps.factor > 0.0 && eps.factor < 1.0)) {
    throw ContractViolation("eps schedule needs eps0 > 0 and 0 < theta < 1");
  }
  if (max_outer < 1) throw ContractViolation("max_outer must be at least 1");
  if (x0.size() != problem.n()) throw ContractViolation("x0 has wrong dimension");
  if (mu1.size() != 0) {
    if (mu1.size() != problem.p()) throw ContractViolation("mu1 has wrong dimension");
    if (mu1.size() > 0 && (mu1.minCoeff() < mu_min || mu1.maxCoeff() > mu_max)) {
      throw ContractViolation("mu1 outside [mu_min, mu_max]");
    }
  }
  if (omega1.size() != 0) {
    if (omega1.size() != problem.m()) throw ContractViolation("omega1 has wrong dimension");
    if (omega1.size() > 0 && (omega1.minCoeff() < 0.0 || omega1.maxCoeff() > omega_max)) {
      throw ContractViolation("omega1 outside [0, omega_max]");
    }
  }
  if (!(stop_tol > 0.0)) throw ContractViolation("stop tolerance must be positive");
}

SolverTrace run_auglag(const NlpProblem& problem, const AugLagParams& params) {
  params.validate(problem);

  SolverTrace trace;
  trace.problem = problem.name();
  trace.method = "auglag";
  trace.params = {{"mu_min", params.mu_min},       {"mu_max", params.mu_max},
                  {"omega_max", params.omega_max}, {"gamma", params.gamma},
                  {"rho_1", params.rho_1},         {"tau", params.tau},
                  {"eps0", params.eps.initial},    {"theta", params.eps.factor},
                  {"max_outer", params.max_outer}, {"stop_tol", params.stop_tol}};
  trace.vectors["x0"] = params.x0;

  AugLagState state;
  state.x = params.x0;
  state.mu = params.mu1.size() == problem.p() ? params.mu1
                                              : Vector::Zero(problem.p()).cwiseMax(params.mu_min).cwiseMin(params.mu_max).eval();
  state.omega = params.omega1.size() == problem.m() ? params.omega1 : Vector::Zero(problem.m());
  state.rho = params.rho_1;
  state.v = problem.g(params.x0).cwiseMax(0.0);
  state.progress = std::max(inf_norm(problem.h(params.x0)), inf_norm(state.v));
  trace.vectors["mu1"] = state.mu;
  trace.vectors["omega1"] = state.omega;

  trace.status = TraceStatus::kMaxOuter;
  for (int k = 1; k <= params.max_outer; ++k) {
    const double rho = state.rho;
    const double eps = params.eps.at(k - 1);
    const Vector mu = state.mu;
    const Vector omega = state.omega;

    const SmoothFunctionOracle oracle{
        [&](const Vector& x) { return auglag_value(problem, rho, mu, omega, x); },
        [&](const Vector& x) { return auglag_grad(problem, rho, mu, omega, x); },
        [&](const Vector& x) { return auglag_hess(problem, rho, mu, omega, x); }};

    TrustRegionResult tr;
    try {
      tr = minimize_second_order(oracle, state.x, eps, params.inner);
    } catch (const EvaluationError& e) {
      trace.status = TraceStatus::kFailed;
      trace.message = "outer iteration " + std::to_string(k) + ": " + e.what();
      break;
    }
    const Vector& x = tr.x_final;
    const Vector g = problem.g(x);

    const std::string overflow = detail::overflow_diagnostic(rho, g + omega / rho);
    if (!overflow.empty()) {
      trace.status = TraceStatus::kFailed;
      trace.message = "outer iteration " + std::to_string(k) + ": " + overflow;
      break;
    }

    state.k = k;
    state.x = x;
    const Multipliers hat = internal_multipliers(problem, rho, mu, omega, x);
    state.mu_hat = hat.mu;
    state.omega_hat = hat.omega;
    const Vector h = problem.h(x);
    state.v = g.cwiseMax(-omega / rho);
    const double progress = std::max(inf_norm(h), inf_norm(state.v));

    TraceRecord rec = detail::make_record(problem, k, x, hat, eps, rho);
    rec.inner = detail::inner_stats(tr);
    rec.mu_safeguarded = mu;
    rec.omega_safeguarded = omega;
    rec.extra["merit"] = tr.value;
    rec.extra["progress"] = progress;

    if (tr.status == TrustRegionStatus::kPrecisionLimit) rec.flags.push_back("inner_precision_limit");
    if (tr.status == TrustRegionStatus::kIterationLimit || tr.status == TrustRegionStatus::kStalled) {
      rec.flags.push_back("inner_failed");
      trace.records.push_back(std::move(rec));
      trace.status = TraceStatus::kFailed;
      trace.message = "outer iteration " + std::to_string(k) + ": inner solver " + to_string(tr.status);
      break;
    }

    const bool done = detail::stop_test(problem, rec, params.stop_tol, params.tol_act);

    // Penalty update against the previous progress measure.
    const bool progressed = progress <= params.tau * state.progress;
    state.rho = progressed ? rho : params.gamma * rho;
    state.progress = progress;
    rec.extra["rho_next"] = state.rho;

    // Safeguarded multiplier updates use rho_k.
    state.mu = (mu + rho * h).cwiseMax(params.mu_min).cwiseMin(params.mu_max);
    state.omega = (omega + rho * g).cwiseMax(0.0).cwiseMin(params.omega_max);

    trace.records.push_back(std::move(rec));
    if (done) {
      trace.status = TraceStatus::kConverged;
      break;
    }
  }
  return trace;
}

}  // namespace sakkt
