#pragma once

#include <cmath>

#include "sakkt/nlp.hpp"
#include "sakkt/trace.hpp"
#include "sakkt/trust_region.hpp"

namespace sakkt {

/// value_k = initial * factor^k.
struct GeometricSchedule {
  double initial = 1.0;
  double factor = 1.0;

  double at(int k) const { return initial * std::pow(factor, k); }
};

/// phi_rho(x) = f + (rho/2) sum h_j^2 + (rho/4) sum max{0, g_i}^4.
double phi(const NlpProblem& problem, double rho, const Vector& x);
Vector phi_grad(const NlpProblem& problem, double rho, const Vector& x);
Matrix phi_hess(const NlpProblem& problem, double rho, const Vector& x);

SmoothFunctionOracle penalty_oracle(const NlpProblem& problem, double rho);

struct Multipliers {
  Vector mu;
  Vector omega;
};

/// mu_j = rho h_j(x), omega_i = rho max{0, g_i(x)}^3, so that
/// grad phi_rho(x) = grad_x L(x, mu, omega).
Multipliers recover_multipliers(const NlpProblem& problem, double rho, const Vector& x);

struct PenaltyParams {
  GeometricSchedule eps{1e-2, 0.5};
  GeometricSchedule rho{10.0, 10.0};
  int max_outer = 30;
  Vector x0;
  /// Outer stop: all AKKT residuals and the S-tilde curvature slack below this.
  double stop_tol = 1e-8;
  double tol_act = 1e-6;
  TrustRegionOptions inner;

  void validate(const NlpProblem& problem) const;
};

/// Basic quartic penalty method; the inner solve of iterate k starts from
/// x^{k-1} (x0 for k = 0).
SolverTrace run_basic(const NlpProblem& problem, const PenaltyParams& params);

/**
 * Modified penalty method. x0 must be feasible. After iterate k the next
 * inner solve starts from x^k if
 *   f(x^k) + (rho_{k+1}/2) sum h^2 + (rho_{k+1}/4) sum max{0,g}^4 <= f(x0),
 * and from x0 otherwise; the branch is recorded on the record of x^k.
 */
SolverTrace run_modified(const NlpProblem& problem, const PenaltyParams& params);

}  // namespace sakkt
