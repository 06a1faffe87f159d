#pragma once

// Shared bookkeeping for the outer loops of the penalty and augmented
// Lagrangian methods.

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sakkt/optimality.hpp"
#include "sakkt/penalty.hpp"
#include "sakkt/trace.hpp"
#include "sakkt/trust_region.hpp"

namespace sakkt::detail {

inline InnerStats inner_stats(const TrustRegionResult& tr) {
  InnerStats stats;
  stats.iterations = tr.iterations;
  stats.status = tr.status;
  stats.grad_norm = tr.grad_norm;
  stats.hess_min_eig = tr.hess_min_eig;
  stats.descent_ok = std::is_sorted(tr.values.rbegin(), tr.values.rend());
  return stats;
}

/// Fills residuals, feasibility and the certified tolerance
/// eps = max(inner_tol, all four residuals).
inline TraceRecord make_record(const NlpProblem& problem, int k, const Vector& x, Multipliers mult,
                               double inner_tol, double rho) {
  TraceRecord rec;
  rec.k = k;
  rec.x = x;
  rec.mu = std::move(mult.mu);
  rec.omega = std::move(mult.omega);
  rec.inner_tol = inner_tol;
  rec.rho = rho;
  rec.residuals = akkt_residuals(problem, {rec.x, rec.mu, rec.omega});
  rec.feasibility = feasibility(problem, x);
  rec.eps = std::max(inner_tol, rec.residuals.max());
  return rec;
}

/// All residuals and the S-tilde curvature slack within stop_tol, with
/// activity taken at the iterate itself.
inline bool stop_test(const NlpProblem& problem, const TraceRecord& rec, double stop_tol,
                      double tol_act) {
  if (rec.residuals.max() > stop_tol) return false;
  const KktTriple t{rec.x, rec.mu, rec.omega};
  const CriticalSpaceSpec space =
      build_space(problem, SpaceKind::kSTilde, rec.x, rec.x, rec.omega, tol_act, 0.0);
  const SecondOrderCertificate cert = second_order_subspace(
      lagrangian_hessian(problem, t), nullspace_basis(space.eq_rows, problem.n(), 1e-10), stop_tol);
  return cert.passed;
}

/// Empty string when rho * max{0, shifted_i}^3 stays below 1e300.
inline std::string overflow_diagnostic(double rho, const Vector& shifted) {
  const double limit = std::cbrt(1e300 / rho);
  for (int i = 0; i < shifted.size(); ++i) {
    if (shifted[i] > limit) {
      std::ostringstream os;
      os << "multiplier overflow guard: rho * max{0, g_" << i << "}^3 exceeds 1e300 (rho = " << rho << ")";
      return os.str();
    }
  }
  return {};
}

}  // namespace sakkt::detail
