#include "sakkt/trust_region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace sakkt {

std::string to_string(TrustRegionStatus status) {
  switch (status) {
    case TrustRegionStatus::kConverged:
      return "converged";
    case TrustRegionStatus::kIterationLimit:
      return "iteration_limit";
    case TrustRegionStatus::kStalled:
      return "stalled";
    case TrustRegionStatus::kPrecisionLimit:
      return "precision_limit";
  }
  return "?";
}

Vector solve_tr_subproblem(const Vector& grad, const Eigen::SelfAdjointEigenSolver<Matrix>& eig,
                           double radius) {
  if (!(radius > 0.0)) throw ContractViolation("trust-region radius must be positive");
  const Vector& lam = eig.eigenvalues();
  const Matrix& Q = eig.eigenvectors();
  const int n = static_cast<int>(lam.size());
  if (grad.size() != n) throw ContractViolation("gradient and Hessian dimensions differ");

  const Vector gh = Q.transpose() * grad;
  const double gnorm = gh.norm();
  const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
  const double tol_eig = 1e-13 * scale;
  const double lam1 = lam[0];

  auto coefficients = [&](double sigma, int first) {
    Vector c = Vector::Zero(n);
    for (int i = first; i < n; ++i) c[i] = -gh[i] / (lam[i] + sigma);
    return c;
  };

  if (lam1 > tol_eig) {
    const Vector c = coefficients(0.0, 0);
    if (c.norm() <= radius) return Q * c;
  }

  // J = eigenvalues indistinguishable from the smallest.
  int jsize = 0;
  while (jsize < n && lam[jsize] <= lam1 + tol_eig) ++jsize;
  const double gj = gh.head(jsize).norm();
  const double lo = std::max(0.0, -lam1);

  if (gj <= 1e-12 * (gnorm + scale * radius)) {
    Vector c = Vector::Zero(n);
    for (int i = jsize; i < n; ++i) {
      const double denom = lam[i] + lo;
      if (denom > 0.0) c[i] = -gh[i] / denom;
    }
    const double cn = c.norm();
    if (cn <= radius) {
      if (lam1 < -tol_eig) {
        // Hard case: move to the boundary along the most negative curvature.
        const double tau = std::sqrt(std::max(0.0, radius * radius - cn * cn));
        c[0] += gh[0] > 0.0 ? -tau : tau;
      }
      return Q * c;
    }
  }

  // Secular equation ||c(sigma)|| = radius on (lo, hi].
  double left = lo;
  double hi = std::max(lo, gnorm / radius - lam1);
  double sigma = hi;
  Vector c = coefficients(sigma, 0);
  for (int it = 0; it < 200; ++it) {
    c = coefficients(sigma, 0);
    const double cn = c.norm();
    if (!std::isfinite(cn)) {
      left = sigma;
      sigma = 0.5 * (left + hi);
      continue;
    }
    if (std::abs(cn - radius) <= 1e-12 * radius) break;
    if (cn > radius) {
      left = sigma;
    } else {
      hi = sigma;
    }
    // Newton step on 1/||c|| - 1/radius.
    double dsum = 0.0;
    for (int i = 0; i < n; ++i) dsum += gh[i] * gh[i] / std::pow(lam[i] + sigma, 3);
    double next = sigma;
    if (dsum > 0.0) next = sigma - (1.0 / cn - 1.0 / radius) * cn * cn * cn / dsum;
    if (!(next > left && next < hi)) next = 0.5 * (left + hi);
    if (next == sigma) break;
    sigma = next;
  }
  const double cn = c.norm();
  if (cn > radius) c *= radius / cn;
  return Q * c;
}

Vector solve_tr_subproblem(const Vector& grad, const Matrix& H, double radius) {
  const Matrix sym = 0.5 * (H + H.transpose());
  return solve_tr_subproblem(grad, Eigen::SelfAdjointEigenSolver<Matrix>(sym), radius);
}

namespace {

struct Point {
  Vector x;
  double value;
  Vector grad;
  Matrix hess;
  Eigen::SelfAdjointEigenSolver<Matrix> eig;
};

void evaluate_derivatives(const SmoothFunctionOracle& oracle, Point& p) {
  p.grad = oracle.gradient(p.x);
  if (p.grad.size() != p.x.size() || !p.grad.allFinite()) {
    throw EvaluationError("trust-region oracle", -1, "non-finite or misshapen gradient");
  }
  const Matrix H = oracle.hessian(p.x);
  if (H.rows() != p.x.size() || H.cols() != p.x.size() || !H.allFinite()) {
    throw EvaluationError("trust-region oracle", -1, "non-finite or misshapen Hessian");
  }
  p.hess = 0.5 * (H + H.transpose());
  p.eig.compute(p.hess);
}

}  // namespace

namespace {

constexpr double kMachine = std::numeric_limits<double>::epsilon();

/// Newton step with eigenvalues floored at the eigensolver's accuracy;
/// empty if the Hessian has curvature below -max(eps, that accuracy).
std::optional<Vector> floored_newton_step(const Point& cur, double eps) {
  const Vector& lam = cur.eig.eigenvalues();
  const double floor = 100.0 * kMachine * lam.cwiseAbs().maxCoeff();
  if (floor == 0.0 || lam[0] < -std::max(eps, floor)) return std::nullopt;
  const Vector gh = cur.eig.eigenvectors().transpose() * cur.grad;
  return (cur.eig.eigenvectors() * (-gh.array() / lam.array().max(floor)).matrix()).eval();
}

/// The gradient is at the noise level of the Hessian, the Newton step cannot
/// move x, or the decrease it predicts is at the roundoff level of f.
bool model_exhausted(const Point& cur, double eps) {
  const auto s = floored_newton_step(cur, eps);
  if (!s) return false;
  const double scale = cur.eig.eigenvalues().cwiseAbs().maxCoeff();
  if (cur.grad.norm() <= 100.0 * kMachine * scale * std::max(1.0, cur.x.norm())) return true;
  if (s->norm() <= 100.0 * kMachine * std::max(1.0, cur.x.norm())) return true;
  const double predicted = -(cur.grad.dot(*s) + 0.5 * s->dot(cur.hess * *s));
  return predicted <= 100.0 * kMachine * std::max(1.0, std::abs(cur.value));
}

}  // namespace

TrustRegionResult minimize_second_order(const SmoothFunctionOracle& oracle, const Vector& x0,
                                        double eps, const TrustRegionOptions& opts) {
  if (!(eps > 0.0)) throw ContractViolation("trust-region tolerance must be positive");
  if (!(opts.initial_radius > 0.0)) throw ContractViolation("initial radius must be positive");

  Point cur{x0, oracle.value(x0), {}, {}, {}};
  if (!std::isfinite(cur.value)) throw EvaluationError("trust-region oracle", -1, "non-finite value at start");
  evaluate_derivatives(oracle, cur);

  TrustRegionResult result;
  result.values.push_back(cur.value);
  double radius = opts.initial_radius;
  // Iterations since the last strict decrease of f.
  int stagnant = 0;

  for (;;) {
    const double gnorm = cur.grad.norm();
    const double lmin = cur.eig.eigenvalues()[0];
    if (gnorm <= eps && lmin >= -eps) {
      result.status = TrustRegionStatus::kConverged;
      break;
    }
    if (result.iterations >= opts.max_iterations) {
      result.status = TrustRegionStatus::kIterationLimit;
      break;
    }
    if (radius < 1e-15 * std::max(1.0, cur.x.norm())) {
      result.status = model_exhausted(cur, eps) ? TrustRegionStatus::kPrecisionLimit : TrustRegionStatus::kStalled;
      break;
    }
    if (stagnant >= 50 && floored_newton_step(cur, eps)) {
      result.status = TrustRegionStatus::kPrecisionLimit;
      break;
    }
    const Vector s = solve_tr_subproblem(cur.grad, cur.eig, radius);
    const double snorm = s.norm();
    ++result.iterations;
    const double predicted = -(cur.grad.dot(s) + 0.5 * s.dot(cur.hess * s));
    if (snorm == 0.0 || !(predicted > 0.0)) {
      radius *= opts.shrink_factor;
      ++stagnant;
      continue;
    }
    Vector trial = cur.x + s;
    if (opts.region && !opts.region(trial)) {
      radius = opts.shrink_factor * std::min(radius, snorm);
      ++stagnant;
      continue;
    }
    const double trial_value = oracle.value(trial);
    if (!std::isfinite(trial_value)) {
      throw EvaluationError("trust-region oracle", -1, "non-finite value at trial point");
    }
    const double actual = cur.value - trial_value;
    double ratio = actual / predicted;
    if (predicted < 100.0 * kMachine * std::max(1.0, std::abs(cur.value))) {
      // Both reductions are at roundoff level; only the sign is meaningful.
      ratio = actual >= 0.0 ? 1.0 : -1.0;
    }
    const bool accept = ratio >= opts.accept_ratio && trial_value <= cur.value;

    if (ratio < opts.shrink_below) {
      radius = opts.shrink_factor * std::min(radius, snorm);
    } else if (ratio > opts.grow_above && snorm >= 0.99 * radius) {
      radius = std::min(opts.grow_factor * radius, opts.max_radius);
    }

    stagnant = actual > 0.0 && accept ? 0 : stagnant + 1;
    if (accept) {
      cur.x = std::move(trial);
      cur.value = trial_value;
      evaluate_derivatives(oracle, cur);
      result.values.push_back(cur.value);
    }
  }

  result.x_final = cur.x;
  result.value = cur.value;
  result.grad_norm = cur.grad.norm();
  result.hess_min_eig = cur.eig.eigenvalues()[0];
  return result;
}

}  // namespace sakkt
