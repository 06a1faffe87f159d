#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sakkt/nlp.hpp"
#include "sakkt/trace.hpp"

namespace sakkt {

/// Throws ContractViolation if any omega_i < 0.
AkktResiduals akkt_residuals(const NlpProblem& problem, const KktTriple& t);

/// Which perturbed direction set to build at (y, x_ref, omega).
enum class SpaceKind {
  kS,       // all active gradients, with equality
  kSTilde,  // active gradients with omega_i > 0, with equality
  kCTilde,  // as kSTilde, plus <= 0 rows for active gradients with omega_i = 0
};

std::string to_string(SpaceKind kind);

struct RowSource {
  FunctionRole role;
  int index;
  bool operator==(const RowSource&) const = default;
};

struct CriticalSpaceSpec {
  SpaceKind kind = SpaceKind::kS;
  int n = 0;
  Matrix eq_rows;  // d' row = 0
  Matrix le_rows;  // d' row <= 0
  std::vector<RowSource> eq_sources;
  std::vector<RowSource> le_sources;
};

/**
 * Assembles a space from gradient rows. ineq_grads holds one row per
 * inequality; only indices in `active` enter. "omega_i > 0" means
 * omega_i > tol_mult.
 */
CriticalSpaceSpec assemble_space(SpaceKind kind, const Matrix& eq_grads, const Matrix& ineq_grads,
                                 const std::vector<int>& active, const Vector& omega,
                                 double tol_mult);

/// Gradients are taken at y, activity at x_ref (tolerance tol_act).
CriticalSpaceSpec build_space(const NlpProblem& problem, SpaceKind kind, const Vector& y,
                              const Vector& x_ref, const Vector& omega, double tol_act,
                              double tol_mult);

/// True if d satisfies every row of the spec to within tol (scaled by the
/// row and direction norms).
bool contains(const CriticalSpaceSpec& spec, const Vector& d, double tol);

/// Orthonormal basis of {d : rows d = 0}. Singular values at or below
/// tol_rank * sigma_max count as zero. No rows gives the identity.
Matrix nullspace_basis(const Matrix& rows, int n, double tol_rank);

enum class CertificateMethod { kExactSubspace, kSampledCone };

std::string to_string(CertificateMethod method);

struct SecondOrderCertificate {
  /// Minimum of d'Hd/||d||^2 over the space (exact) or over the samples.
  /// +inf when the space is {0}.
  double lambda_min = std::numeric_limits<double>::infinity();
  int basis_dim = 0;
  bool passed = true;
  /// Unit direction with d'Hd < -eps, present iff !passed.
  std::optional<Vector> witness;
  CertificateMethod method = CertificateMethod::kExactSubspace;
  int samples_in_cone = 0;
  std::uint64_t seed = 0;
};

/// Smallest eigenvalue of Z'HZ against -eps. Throws on non-symmetric H.
SecondOrderCertificate second_order_subspace(const Matrix& H, const Matrix& Z, double eps);

/**
 * Falsification check of d'Hd >= -eps||d||^2 over a polyhedral cone.
 *
 * Directions are drawn uniformly from the unit sphere of the equality-row
 * null space and kept when they satisfy the <= rows (to 1e-12). The exact
 * minimum over the largest subspace inside the cone (all rows as
 * equalities) is checked first. Without <= rows, or when the equality rows
 * leave only {0}, this is the exact subspace check. A pass means no
 * violation was found, not that none exists.
 */
SecondOrderCertificate second_order_cone_sampled(const Matrix& H, const CriticalSpaceSpec& spec,
                                                 double eps, int n_samples, std::uint64_t seed,
                                                 double tol_rank = 1e-10);

enum class Condition { kAkkt, kAkkt2, kCSakkt2, kSSakkt2 };

std::string to_string(Condition condition);
/// Accepts akkt, akkt2, csakkt2, ssakkt2.
std::optional<Condition> parse_condition(const std::string& name);

struct CertifyOptions {
  int window = 5;
  /// The window admits records within radius_factor * max(||x^K - x*||,
  /// ||x^K - x^{K-1}||) of x*, where K is the last record.
  double radius_factor = 10.0;
  double tol_act = 1e-6;
  double tol_mult = 0.0;
  double tol_rank = 1e-10;
  int n_samples = 10000;
  std::uint64_t seed = 20240611;
  /// eps_{k+1} <= eps_slack * eps_k is accepted as non-increasing.
  double eps_slack = 1.05;
};

enum class Verdict { kPass, kFail, kInconclusive };

std::string to_string(Verdict verdict);

struct IterationCheck {
  int k = 0;
  double eps = 0.0;
  AkktResiduals residuals;
  bool first_order_passed = true;
  std::optional<CriticalSpaceSpec> space;
  std::optional<SecondOrderCertificate> second_order;
  bool passed = true;
};

struct ConditionReport {
  std::string problem;
  Condition condition = Condition::kAkkt;
  Verdict verdict = Verdict::kInconclusive;
  Vector x_star;
  double window_radius = 0.0;
  CertifyOptions options;
  std::vector<IterationCheck> iterations;
  std::optional<int> failing_k;
  std::string reason;
  std::optional<Vector> witness;
};

/**
 * Checks the chosen sequential condition on the tail of a trace: the last
 * `window` records close to x_star. Residuals are recomputed from the
 * problem; the recorded eps_k is the tolerance.
 */
ConditionReport certify_trace(const NlpProblem& problem, const SolverTrace& trace,
                              const Vector& x_star, Condition condition,
                              const CertifyOptions& options = {});

}  // namespace sakkt
