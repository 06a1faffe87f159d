#include "sakkt/optimality.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace sakkt {

namespace {

// Flip so the largest-magnitude component is positive.
Vector canonical_direction(Vector d) {
  const double norm = d.norm();
  if (norm > 0.0) d /= norm;
  Eigen::Index arg = 0;
  d.cwiseAbs().maxCoeff(&arg);
  if (d.size() > 0 && d[arg] < 0.0) d = -d;
  return d;
}

void require_symmetric(const Matrix& H) {
  if (H.rows() != H.cols()) throw ContractViolation("Hessian must be square");
  const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
  if ((H - H.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw ContractViolation("Hessian is not symmetric");
  }
}

Matrix stack_rows(const Matrix& a, const Matrix& b, int n) {
  Matrix out(a.rows() + b.rows(), n);
  if (a.rows() > 0) out.topRows(a.rows()) = a;
  if (b.rows() > 0) out.bottomRows(b.rows()) = b;
  return out;
}

}  // namespace

AkktResiduals akkt_residuals(const NlpProblem& problem, const KktTriple& t) {
  if (t.omega.size() != problem.m() || t.mu.size() != problem.p()) {
    throw ContractViolation("multiplier dimensions do not match problem '" + problem.name() + "'");
  }
  if (t.omega.size() > 0 && t.omega.minCoeff() < 0.0) {
    throw ContractViolation("inequality multipliers must be nonnegative");
  }
  const Vector g = problem.g(t.x);
  AkktResiduals r;
  r.grad = lagrangian_gradient(problem, t).norm();
  r.eq = problem.h(t.x).norm();
  r.ineq = g.cwiseMax(0.0).norm();
  r.comp = t.omega.cwiseMin(-g).norm();
  return r;
}

std::string to_string(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::kS:
      return "S";
    case SpaceKind::kSTilde:
      return "S_tilde";
    case SpaceKind::kCTilde:
      return "C_tilde";
  }
  return "?";
}

CriticalSpaceSpec assemble_space(SpaceKind kind, const Matrix& eq_grads, const Matrix& ineq_grads,
                                 const std::vector<int>& active, const Vector& omega,
                                 double tol_mult) {
  if (tol_mult < 0.0) throw ContractViolation("multiplier threshold must be nonnegative");
  const int n = static_cast<int>(std::max(eq_grads.cols(), ineq_grads.cols()));
  CriticalSpaceSpec spec;
  spec.kind = kind;
  spec.n = n;

  std::vector<Vector> eq;
  std::vector<Vector> le;
  for (int j = 0; j < eq_grads.rows(); ++j) {
    eq.push_back(eq_grads.row(j).transpose());
    spec.eq_sources.push_back({FunctionRole::kEquality, j});
  }
  for (int i : active) {
    if (i < 0 || i >= ineq_grads.rows() || i >= omega.size()) {
      throw ContractViolation("active index out of range");
    }
    const bool positive = omega[i] > tol_mult;
    if (kind == SpaceKind::kS || positive) {
      eq.push_back(ineq_grads.row(i).transpose());
      spec.eq_sources.push_back({FunctionRole::kInequality, i});
    } else if (kind == SpaceKind::kCTilde) {
      le.push_back(ineq_grads.row(i).transpose());
      spec.le_sources.push_back({FunctionRole::kInequality, i});
    }
  }
  spec.eq_rows.resize(static_cast<Eigen::Index>(eq.size()), n);
  for (std::size_t r = 0; r < eq.size(); ++r) spec.eq_rows.row(r) = eq[r].transpose();
  spec.le_rows.resize(static_cast<Eigen::Index>(le.size()), n);
  for (std::size_t r = 0; r < le.size(); ++r) spec.le_rows.row(r) = le[r].transpose();
  return spec;
}

CriticalSpaceSpec build_space(const NlpProblem& problem, SpaceKind kind, const Vector& y,
                              const Vector& x_ref, const Vector& omega, double tol_act,
                              double tol_mult) {
  if (omega.size() != problem.m()) throw ContractViolation("omega has wrong dimension");
  const std::vector<int> active = active_set(problem, x_ref, tol_act);
  return assemble_space(kind, problem.jac_h(y), problem.jac_g(y), active, omega, tol_mult);
}

bool contains(const CriticalSpaceSpec& spec, const Vector& d, double tol) {
  const double dn = d.norm();
  for (int r = 0; r < spec.eq_rows.rows(); ++r) {
    if (std::abs(spec.eq_rows.row(r).dot(d)) > tol * spec.eq_rows.row(r).norm() * dn) return false;
  }
  for (int r = 0; r < spec.le_rows.rows(); ++r) {
    if (spec.le_rows.row(r).dot(d) > tol * spec.le_rows.row(r).norm() * dn) return false;
  }
  return true;
}

Matrix nullspace_basis(const Matrix& rows, int n, double tol_rank) {
  if (rows.rows() > 0 && rows.cols() != n) throw ContractViolation("rows must have n columns");
  if (rows.rows() == 0) return Matrix::Identity(n, n);
  Eigen::JacobiSVD<Matrix> svd(rows, Eigen::ComputeFullV);
  const Vector& sigma = svd.singularValues();
  const double sigma_max = sigma.size() > 0 ? sigma[0] : 0.0;
  int rank = 0;
  for (int i = 0; i < sigma.size(); ++i) {
    if (sigma[i] > tol_rank * sigma_max && sigma[i] > 0.0) ++rank;
  }
  return svd.matrixV().rightCols(n - rank);
}

std::string to_string(CertificateMethod method) {
  return method == CertificateMethod::kExactSubspace ? "exact-subspace" : "sampled-cone";
}

SecondOrderCertificate second_order_subspace(const Matrix& H, const Matrix& Z, double eps) {
  require_symmetric(H);
  if (Z.rows() != H.rows()) throw ContractViolation("basis and Hessian dimensions differ");
  SecondOrderCertificate cert;
  cert.method = CertificateMethod::kExactSubspace;
  cert.basis_dim = static_cast<int>(Z.cols());
  if (Z.cols() == 0) return cert;

  Matrix reduced = Z.transpose() * H * Z;
  reduced = 0.5 * (reduced + reduced.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(reduced);
  cert.lambda_min = eig.eigenvalues()[0];
  cert.passed = cert.lambda_min >= -eps;
  if (!cert.passed) cert.witness = canonical_direction(Z * eig.eigenvectors().col(0));
  return cert;
}

SecondOrderCertificate second_order_cone_sampled(const Matrix& H, const CriticalSpaceSpec& spec,
                                                 double eps, int n_samples, std::uint64_t seed,
                                                 double tol_rank) {
  if (n_samples < 1) throw ContractViolation("need at least one sample");
  require_symmetric(H);
  const int n = static_cast<int>(H.rows());
  const Matrix Z = nullspace_basis(spec.eq_rows, n, tol_rank);
  if (spec.le_rows.rows() == 0 || Z.cols() == 0) return second_order_subspace(H, Z, eps);

  SecondOrderCertificate cert;
  cert.method = CertificateMethod::kSampledCone;
  cert.basis_dim = static_cast<int>(Z.cols());
  cert.seed = seed;

  Vector best;
  auto consider = [&](const Vector& d) {
    const double q = d.dot(H * d) / d.squaredNorm();
    if (q < cert.lambda_min) {
      cert.lambda_min = q;
      best = d;
    }
  };

  // The lineality space of the cone, checked exactly.
  const Matrix Zs = nullspace_basis(stack_rows(spec.eq_rows, spec.le_rows, n), n, tol_rank);
  if (Zs.cols() > 0) {
    Matrix reduced = Zs.transpose() * H * Zs;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (reduced + reduced.transpose()));
    consider(Zs * eig.eigenvectors().col(0));
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector u(Z.cols());
  constexpr double kConeTol = 1e-12;
  auto in_cone = [&](const Vector& d) {
    for (int r = 0; r < spec.le_rows.rows(); ++r) {
      if (spec.le_rows.row(r).dot(d) > kConeTol * spec.le_rows.row(r).norm()) return false;
    }
    return true;
  };
  for (int s = 0; s < n_samples; ++s) {
    for (int c = 0; c < u.size(); ++c) u[c] = normal(rng);
    Vector d = Z * u;
    const double norm = d.norm();
    if (norm == 0.0) continue;
    d /= norm;
    // d'Hd is even in d, so the reflected direction is an equally valid draw.
    if (!in_cone(d)) d = -d;
    if (!in_cone(d)) continue;
    ++cert.samples_in_cone;
    consider(d);
  }

  cert.passed = cert.lambda_min >= -eps;
  if (!cert.passed) cert.witness = canonical_direction(best);
  return cert;
}

std::string to_string(Condition condition) {
  switch (condition) {
    case Condition::kAkkt:
      return "akkt";
    case Condition::kAkkt2:
      return "akkt2";
    case Condition::kCSakkt2:
      return "csakkt2";
    case Condition::kSSakkt2:
      return "ssakkt2";
  }
  return "?";
}

std::optional<Condition> parse_condition(const std::string& name) {
  for (Condition c : {Condition::kAkkt, Condition::kAkkt2, Condition::kCSakkt2, Condition::kSSakkt2}) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::kPass:
      return "pass";
    case Verdict::kFail:
      return "fail";
    case Verdict::kInconclusive:
      return "inconclusive";
  }
  return "?";
}

ConditionReport certify_trace(const NlpProblem& problem, const SolverTrace& trace,
                              const Vector& x_star, Condition condition,
                              const CertifyOptions& options) {
  if (x_star.size() != problem.n()) throw ContractViolation("x_star has wrong dimension");
  if (options.window < 1) throw ContractViolation("certification window must hold a record");

  ConditionReport report;
  report.problem = problem.name();
  report.condition = condition;
  report.x_star = x_star;
  report.options = options;

  const auto& records = trace.records;
  if (records.empty()) {
    report.verdict = Verdict::kInconclusive;
    report.reason = "trace has no records";
    return report;
  }

  const Vector& last = records.back().x;
  double base = (last - x_star).norm();
  if (records.size() >= 2) base = std::max(base, (last - records[records.size() - 2].x).norm());
  report.window_radius = options.radius_factor * base + 1e-12 * std::max(1.0, x_star.norm());

  std::vector<const TraceRecord*> window;
  for (auto it = records.rbegin(); it != records.rend(); ++it) {
    if (static_cast<int>(window.size()) == options.window) break;
    if ((it->x - x_star).norm() > report.window_radius) break;
    window.push_back(&*it);
  }
  std::reverse(window.begin(), window.end());
  if (window.empty()) {
    report.verdict = Verdict::kInconclusive;
    report.reason = "no record within the window radius of x_star";
    return report;
  }

  std::optional<SpaceKind> kind;
  if (condition == Condition::kAkkt2) kind = SpaceKind::kS;
  if (condition == Condition::kCSakkt2) kind = SpaceKind::kCTilde;
  if (condition == Condition::kSSakkt2) kind = SpaceKind::kSTilde;

  for (const TraceRecord* rec : window) {
    if (!(rec->eps > 0.0) || !std::isfinite(rec->eps)) {
      throw ContractViolation("trace tolerance eps must be positive and finite");
    }
    const KktTriple t{rec->x, rec->mu, rec->omega};
    IterationCheck check;
    check.k = rec->k;
    check.eps = rec->eps;
    check.residuals = akkt_residuals(problem, t);
    check.first_order_passed = check.residuals.max() <= rec->eps;
    check.passed = check.first_order_passed;

    if (kind) {
      CriticalSpaceSpec space =
          build_space(problem, *kind, rec->x, x_star, rec->omega, options.tol_act, options.tol_mult);
      const Matrix H = lagrangian_hessian(problem, t);
      if (*kind == SpaceKind::kCTilde) {
        check.second_order = second_order_cone_sampled(H, space, rec->eps, options.n_samples,
                                                       options.seed + static_cast<std::uint64_t>(rec->k),
                                                       options.tol_rank);
      } else {
        check.second_order =
            second_order_subspace(H, nullspace_basis(space.eq_rows, problem.n(), options.tol_rank), rec->eps);
      }
      check.space = std::move(space);
      check.passed = check.passed && check.second_order->passed;
    }

    if (!check.passed && !report.failing_k) {
      report.failing_k = check.k;
      std::ostringstream why;
      if (!check.first_order_passed) {
        why << "AKKT residual " << check.residuals.max() << " exceeds eps " << rec->eps;
      } else {
        why << "second-order test: lambda_min " << check.second_order->lambda_min << " below -eps = "
            << -rec->eps;
        report.witness = check.second_order->witness;
      }
      report.reason = why.str();
    }
    report.iterations.push_back(std::move(check));
  }

  if (!report.failing_k) {
    for (std::size_t i = 1; i < window.size(); ++i) {
      if (window[i]->eps > options.eps_slack * window[i - 1]->eps) {
        report.failing_k = window[i]->k;
        std::ostringstream why;
        why << "eps increases from " << window[i - 1]->eps << " to " << window[i]->eps;
        report.reason = why.str();
        break;
      }
    }
  }

  report.verdict = report.failing_k ? Verdict::kFail : Verdict::kPass;
  if (report.verdict == Verdict::kPass) report.reason = "all window records pass";
  return report;
}

}  // namespace sakkt
