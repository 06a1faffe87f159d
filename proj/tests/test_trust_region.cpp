#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>

#include "sakkt/trust_region.hpp"

using namespace sakkt;

namespace {

Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

SmoothFunctionOracle saddle() {
  return {[](const Vector& x) { return std::pow(x[0] * x[0] - 1, 2) + x[1] * x[1]; },
          [](const Vector& x) { return v2(4 * x[0] * (x[0] * x[0] - 1), 2 * x[1]); },
          [](const Vector& x) {
            Matrix H = Matrix::Zero(2, 2);
            H(0, 0) = 12 * x[0] * x[0] - 4;
            H(1, 1) = 2;
            return H;
          }};
}

SmoothFunctionOracle quadratic(const Matrix& A, const Vector& b) {
  return {[A, b](const Vector& x) { return 0.5 * x.dot(A * x) - b.dot(x); },
          [A, b](const Vector& x) { return (A * x - b).eval(); }, [A](const Vector&) { return A; }};
}

bool non_increasing(const std::vector<double>& v) {
  for (size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[i - 1]) return false;
  return true;
}

}  // namespace

TEST(TrustRegion, EscapesSaddle) {
  const TrustRegionResult r = minimize_second_order(saddle(), Vector::Zero(2), 1e-8);
  EXPECT_EQ(r.status, TrustRegionStatus::kConverged);
  EXPECT_LE(r.grad_norm, 1e-8);
  EXPECT_NEAR(r.hess_min_eig, 2.0, 1e-6);
  EXPECT_NEAR(std::abs(r.x_final[0]), 1.0, 1e-6);
  EXPECT_NEAR(r.x_final[1], 0.0, 1e-6);
  EXPECT_TRUE(non_increasing(r.values));
  ASSERT_GE(r.values.size(), 2u);
  EXPECT_LT(r.values[1], r.values[0]);
}

TEST(TrustRegion, ConvexQuadratic) {
  Matrix A(3, 3);
  A << 4, 1, 0, 1, 3, 1, 0, 1, 2;
  const Vector b = (Vector(3) << 1, -2, 3).finished();
  const TrustRegionResult r = minimize_second_order(quadratic(A, b), Vector::Zero(3), 1e-10);
  EXPECT_EQ(r.status, TrustRegionStatus::kConverged);
  EXPECT_LE((r.x_final - A.ldlt().solve(b)).norm(), 1e-10);
  EXPECT_LE(r.iterations, 5);
}

TEST(TrustRegion, OptimalStartReturnsImmediately) {
  const Vector x0 = v2(1, 0);
  const TrustRegionResult r = minimize_second_order(saddle(), x0, 1e-8);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_EQ(r.x_final, x0);
  EXPECT_EQ(r.status, TrustRegionStatus::kConverged);
}

TEST(TrustRegion, ConvergedMeetsBothTests) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> N(0.0, 2.0);
  for (int t = 0; t < 30; ++t) {
    const Vector x0 = v2(N(rng), N(rng));
    const TrustRegionResult r = minimize_second_order(saddle(), x0, 1e-9);
    ASSERT_EQ(r.status, TrustRegionStatus::kConverged);
    EXPECT_LE(r.grad_norm, 1e-9);
    EXPECT_GE(r.hess_min_eig, -1e-9);
    EXPECT_TRUE(non_increasing(r.values));
  }
}

TEST(TrustRegion, IterationLimit) {
  TrustRegionOptions o;
  o.max_iterations = 1;
  o.initial_radius = 1e-3;
  const TrustRegionResult r = minimize_second_order(saddle(), v2(3, 3), 1e-12, o);
  EXPECT_EQ(r.status, TrustRegionStatus::kIterationLimit);
  EXPECT_EQ(r.iterations, 1);
}

TEST(TrustRegion, RegionRejectsSteps) {
  TrustRegionOptions o;
  o.region = [](const Vector& x) { return x.norm() <= 0.5; };
  o.initial_radius = 0.1;
  const TrustRegionResult r = minimize_second_order(saddle(), Vector::Zero(2), 1e-8, o);
  EXPECT_LE(r.x_final.norm(), 0.5);
  EXPECT_TRUE(non_increasing(r.values));
}

TEST(TrustRegion, NonFiniteRaises) {
  SmoothFunctionOracle bad{[](const Vector& x) { return std::log(x[0]); },
                           [](const Vector& x) { return Vector::Constant(1, 1.0 / x[0]).eval(); },
                           [](const Vector& x) { return Matrix::Constant(1, 1, -1.0 / (x[0] * x[0])).eval(); }};
  EXPECT_THROW(minimize_second_order(bad, Vector::Constant(1, 0.5), 1e-8), EvaluationError);
}

TEST(TrustRegion, BadArgumentsRejected) {
  EXPECT_THROW(minimize_second_order(saddle(), Vector::Zero(2), 0.0), ContractViolation);
  TrustRegionOptions o;
  o.initial_radius = -1;
  EXPECT_THROW(minimize_second_order(saddle(), Vector::Zero(2), 1e-8, o), ContractViolation);
}

TEST(Subproblem, InteriorNewtonStep) {
  const Vector s = solve_tr_subproblem(v2(1, 0), Matrix::Identity(2, 2), 10.0);
  EXPECT_NEAR((s - v2(-1, 0)).norm(), 0.0, 1e-14);
}

TEST(Subproblem, HardCaseAlongNegativeCurvature) {
  Matrix H = Matrix::Zero(2, 2);
  H(0, 0) = -4;
  H(1, 1) = 2;
  const Vector s = solve_tr_subproblem(Vector::Zero(2), H, 1.0);
  EXPECT_NEAR(std::abs(s[0]), 1.0, 1e-12);
  EXPECT_NEAR(s[1], 0.0, 1e-12);
}

TEST(Subproblem, ZeroGradientPsd) {
  Matrix H = Matrix::Identity(2, 2);
  H(1, 1) = 0.0;
  EXPECT_EQ(solve_tr_subproblem(Vector::Zero(2), H, 1.0).norm(), 0.0);
}

TEST(Subproblem, LargeRadiusEqualsNewton) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> N;
  for (int t = 0; t < 50; ++t) {
    const int n = 1 + t % 5;
    Matrix A = Matrix::NullaryExpr(n, n, [&] { return N(rng); });
    const Matrix H = A * A.transpose() + Matrix::Identity(n, n);
    const Vector g = Vector::NullaryExpr(n, [&] { return N(rng); });
    const Vector newton = -H.ldlt().solve(g);
    const Vector s = solve_tr_subproblem(g, H, 1e6);
    EXPECT_LE((s - newton).norm(), 1e-10 * (1 + newton.norm()));
  }
}

TEST(Subproblem, BoundaryOptimality) {
  // On the boundary the solution satisfies (H + lambda I) s = -g with lambda >= -lambda_min(H).
  std::mt19937_64 rng(5);
  std::normal_distribution<double> N;
  for (int t = 0; t < 50; ++t) {
    const int n = 2 + t % 4;
    Matrix A = Matrix::NullaryExpr(n, n, [&] { return N(rng); });
    const Matrix H = A + A.transpose();
    const Vector g = Vector::NullaryExpr(n, [&] { return N(rng); });
    const double radius = 0.1 + std::abs(N(rng));
    const Vector s = solve_tr_subproblem(g, H, radius);
    EXPECT_LE(s.norm(), radius * (1 + 1e-10));
    const double model = g.dot(s) + 0.5 * s.dot(H * s);
    // no random feasible point does better
    for (int q = 0; q < 200; ++q) {
      Vector d = Vector::NullaryExpr(n, [&] { return N(rng); });
      d *= radius * std::abs(N(rng)) / std::max(1.0, d.norm()) / 2.0;
      if (d.norm() > radius) d *= radius / d.norm();
      EXPECT_GE(g.dot(d) + 0.5 * d.dot(H * d), model - 1e-9 * (1 + std::abs(model)));
    }
  }
}

TEST(Status, Names) {
  EXPECT_EQ(to_string(TrustRegionStatus::kConverged), "converged");
  EXPECT_EQ(to_string(TrustRegionStatus::kIterationLimit), "iteration_limit");
  EXPECT_EQ(to_string(TrustRegionStatus::kStalled), "stalled");
  EXPECT_EQ(to_string(TrustRegionStatus::kPrecisionLimit), "precision_limit");
}
