#pragma once

#include <cstdint>

#include "sakkt/nlp.hpp"
#include "sakkt/penalty.hpp"
#include "sakkt/trace.hpp"

namespace sakkt {

/// Largest dimension the ball-constrained global solve accepts.
inline constexpr int kOracleMaxDimension = 4;

struct OracleConfig {
  Vector x_bar;
  /// Ball radius, strictly inside (0, 1/3).
  double delta = 0.3;
  GeometricSchedule rho{1e6, 10.0};
  int k_max = 6;
  int grid_per_dim = 5;
  int random_starts = 20;
  std::uint64_t seed = 7;
  /// Stationarity tolerance of each local solve.
  double inner_tol = 1e-12;
  /// Worker threads for the multistart.
  int jobs = 1;

  void validate(const NlpProblem& problem) const;
};

/// F(x) = phi_rho(x) + ||x - x_bar||^4 / 4.
double regularized_value(const NlpProblem& problem, const Vector& x_bar, double rho, const Vector& x);
Vector regularized_grad(const NlpProblem& problem, const Vector& x_bar, double rho, const Vector& x);
Matrix regularized_hess(const NlpProblem& problem, const Vector& x_bar, double rho, const Vector& x);

struct BallSolution {
  Vector x;
  double value = 0.0;
  /// Ended on the sphere ||x - x_bar|| = delta (up to 1e-8 relative).
  bool on_boundary = false;
  /// The winning local solve met its stationarity test.
  bool converged = false;
  int starts = 0;
};

/**
 * Best local minimizer of F over the closed ball B(x_bar, delta) from a
 * grid of grid_per_dim^n seeds, random_starts uniform seeds and x_bar
 * itself. Trial steps leaving the ball are rejected. Ties in F are broken
 * by lexicographic order of x, so the result does not depend on `jobs`.
 * Throws UnsupportedScale for n > kOracleMaxDimension.
 */
BallSolution solve_global_in_ball(const NlpProblem& problem, const OracleConfig& cfg, double rho);

/**
 * For k < k_max: x^k from solve_global_in_ball, (mu^k, omega^k) from the
 * penalty recovery formulas, and
 *   eps_k = max{||x^k - x_bar||, ||h(x^k)||, ||max{0, g(x^k)}||},
 * floored at 1e-16. Records carry ||x^k - x_bar||^3 and the gap to
 * ||grad_x L(x^k, mu^k, omega^k)|| in `extra`.
 */
SolverTrace necessity_sequence(const NlpProblem& problem, const OracleConfig& cfg);

}  // namespace sakkt
