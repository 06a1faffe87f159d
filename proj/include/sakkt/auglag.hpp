#pragma once

#include "sakkt/nlp.hpp"
#include "sakkt/penalty.hpp"
#include "sakkt/trace.hpp"
#include "sakkt/trust_region.hpp"

namespace sakkt {

/// L_rho(x, mu, omega) = f + (rho/2) sum (h_j + mu_j/rho)^2
///                         + (rho/4) sum max{0, g_i + omega_i/rho}^4.
double auglag_value(const NlpProblem& problem, double rho, const Vector& mu, const Vector& omega,
                    const Vector& x);
Vector auglag_grad(const NlpProblem& problem, double rho, const Vector& mu, const Vector& omega,
                   const Vector& x);
Matrix auglag_hess(const NlpProblem& problem, double rho, const Vector& mu, const Vector& omega,
                   const Vector& x);

/// mu_hat = mu + rho h(x), omega_hat = rho max{0, g + omega/rho}^3.
Multipliers internal_multipliers(const NlpProblem& problem, double rho, const Vector& mu,
                                 const Vector& omega, const Vector& x);

struct AugLagParams {
  double mu_min = -1e6;
  double mu_max = 1e6;
  double omega_max = 1e6;
  double gamma = 10.0;
  double rho_1 = 10.0;
  double tau = 0.5;
  GeometricSchedule eps{1e-2, 0.1};
  /// Initial safeguarded multipliers; empty means zero.
  Vector mu1;
  Vector omega1;
  Vector x0;
  int max_outer = 30;
  double stop_tol = 1e-8;
  double tol_act = 1e-6;
  TrustRegionOptions inner;

  void validate(const NlpProblem& problem) const;
};

struct AugLagState {
  int k = 0;
  Vector x;
  Vector mu;      // safeguarded, used in the subproblem
  Vector omega;   // safeguarded, used in the subproblem
  Vector mu_hat;
  Vector omega_hat;
  double rho = 0.0;
  Vector v;  // V_i = max{g_i(x), -omega_i/rho}
  double progress = 0.0;  // max{||h||_inf, ||V||_inf}
};

/**
 * Safeguarded augmented Lagrangian method with the quartic inequality
 * term. Records carry the internal multipliers (mu_hat, omega_hat) as the
 * certified sequence and the safeguarded pair separately. Outer index k
 * starts at 1; the first progress test compares against h(x0) and
 * V^0 = max{0, g(x0)}.
 */
SolverTrace run_auglag(const NlpProblem& problem, const AugLagParams& params);

}  // namespace sakkt
