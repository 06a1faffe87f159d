#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "sakkt/types.hpp"

namespace sakkt {

/// Value, gradient and Hessian of a C^2 function R^n -> R.
struct SmoothFunctionOracle {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  std::function<Matrix(const Vector&)> hessian;
};

enum class TrustRegionStatus {
  kConverged,
  kIterationLimit,
  /// The radius collapsed below roundoff before the tests were met.
  kStalled,
  /// The Newton step fell below the resolution of x with no negative
  /// curvature left; the gradient test is out of reach in floating point.
  kPrecisionLimit,
};

std::string to_string(TrustRegionStatus status);

struct TrustRegionOptions {
  double initial_radius = 1.0;
  double max_radius = 1e8;
  double accept_ratio = 0.1;
  double shrink_below = 0.25;
  double shrink_factor = 0.25;
  double grow_above = 0.75;
  double grow_factor = 2.0;
  int max_iterations = 10000;
  /// Optional admissible region. Trial points outside it are rejected and
  /// the radius shrinks, as if the model had predicted badly.
  std::function<bool(const Vector&)> region;
};

struct TrustRegionResult {
  Vector x_final;
  double value = 0.0;
  double grad_norm = 0.0;
  double hess_min_eig = 0.0;
  int iterations = 0;
  /// Objective at x0 followed by the value at every accepted step.
  std::vector<double> values;
  TrustRegionStatus status = TrustRegionStatus::kIterationLimit;
};

/**
 * Trust-region Newton method that terminates only at a point with
 * ||grad|| <= eps and lambda_min(hess) >= -eps. Each subproblem is solved
 * exactly from an eigendecomposition of the Hessian, so saddle points are
 * escaped along negative curvature. Accepted values never increase.
 */
TrustRegionResult minimize_second_order(const SmoothFunctionOracle& oracle, const Vector& x0,
                                        double eps, const TrustRegionOptions& opts = {});

/// argmin_{||s|| <= radius} grad's + s'Hs/2, solved through the secular
/// equation (hard case included).
Vector solve_tr_subproblem(const Vector& grad, const Matrix& H, double radius);
Vector solve_tr_subproblem(const Vector& grad, const Eigen::SelfAdjointEigenSolver<Matrix>& eig,
                           double radius);

}  // namespace sakkt
