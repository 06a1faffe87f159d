#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sakkt/auglag.hpp"
#include "sakkt/optimality.hpp"
#include "sakkt/problemlib.hpp"

using namespace sakkt;

namespace {

Vector v1(double a) { return Vector::Constant(1, a); }
Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

Vector random_point(std::mt19937_64& rng, int n, double scale) {
  std::normal_distribution<double> N(0.0, scale);
  Vector x(n);
  for (int i = 0; i < n; ++i) x[i] = N(rng);
  return x;
}

// minimizer of x1^2 + x2^2 + (rho/2)(x1 + x2 - 2 + mu/rho)^2: x1 = x2 = (2 rho - mu) / (2 + 2 rho)
Vector eqcon_subproblem(double rho, double mu) { return Vector::Constant(2, (2 * rho - mu) / (2 + 2 * rho)); }

AugLagParams eqcon_params() {
  AugLagParams p;
  p.x0 = v2(2, 0);
  return p;
}

}  // namespace

TEST(Function, ZeroMultipliersGivePenalty) {
  std::mt19937_64 rng(1);
  for (const std::string& name : list()) {
    const NlpProblem& p = get(name).problem;
    const Vector mu = Vector::Zero(p.p()), om = Vector::Zero(p.m());
    for (int t = 0; t < 20; ++t) {
      const Vector x = random_point(rng, p.n(), 2.0);
      EXPECT_EQ(auglag_value(p, 3.0, mu, om, x), phi(p, 3.0, x)) << name;
      EXPECT_EQ(auglag_grad(p, 3.0, mu, om, x), phi_grad(p, 3.0, x)) << name;
      EXPECT_EQ(auglag_hess(p, 3.0, mu, om, x), phi_hess(p, 3.0, x)) << name;
      const Multipliers a = internal_multipliers(p, 3.0, mu, om, x);
      const Multipliers b = recover_multipliers(p, 3.0, x);
      EXPECT_EQ(a.mu, b.mu);
      EXPECT_EQ(a.omega, b.omega);
    }
  }
}

TEST(Function, ShiftedInactiveConstraintContributesNothing) {
  const NlpProblem& p = get("box-ineq").problem;  // g = -x1
  const Vector x = v2(0.5, 1.0);                  // g + omega/rho = -0.5 + 0.2
  const double rho = 10.0;
  const Vector om = v1(2.0);
  EXPECT_EQ(auglag_value(p, rho, Vector(0), om, x), p.f(x));
  EXPECT_EQ(auglag_grad(p, rho, Vector(0), om, x), p.grad_f(x));
  EXPECT_EQ(auglag_hess(p, rho, Vector(0), om, x), p.hess_f(x));
  EXPECT_EQ(internal_multipliers(p, rho, Vector(0), om, x).omega, v1(0.0));
}

TEST(Function, DerivativesMatchDifferences) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(0.0, 2.0);
  for (const std::string& name : list()) {
    const NlpProblem& p = get(name).problem;
    for (int t = 0; t < 10; ++t) {
      const Vector x = random_point(rng, p.n(), 1.0);
      const Vector mu = random_point(rng, p.p(), 1.0);
      Vector om(p.m());
      for (int i = 0; i < p.m(); ++i) om[i] = U(rng);
      const Vector fd = oracles::fd_gradient([&](const Vector& y) { return auglag_value(p, 4.0, mu, om, y); }, x);
      const Vector g = auglag_grad(p, 4.0, mu, om, x);
      EXPECT_LE((fd - g).norm(), 1e-6 * (1 + g.norm())) << name;
      const Matrix fh =
          oracles::fd_hessian([&](const Vector& y) { return auglag_grad(p, 4.0, mu, om, y); }, x);
      EXPECT_LE((fh - auglag_hess(p, 4.0, mu, om, x)).norm(), 1e-6 * (1 + fh.norm())) << name;
    }
  }
}

TEST(Function, GradientIdentityWithHattedMultipliers) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.0, 3.0);
  for (const std::string& name : list()) {
    const NlpProblem& p = get(name).problem;
    for (int t = 0; t < 100; ++t) {
      const Vector x = random_point(rng, p.n(), 2.0);
      const Vector mu = random_point(rng, p.p(), 2.0);
      Vector om(p.m());
      for (int i = 0; i < p.m(); ++i) om[i] = U(rng);
      const double rho = std::pow(10.0, t % 6);
      const Multipliers hat = internal_multipliers(p, rho, mu, om, x);
      const Vector a = auglag_grad(p, rho, mu, om, x);
      const Vector b = lagrangian_gradient(p, {x, hat.mu, hat.omega});
      EXPECT_LE((a - b).norm(), 1e-12 * (1 + a.norm())) << name;
      const Vector shifted = p.g(x) + om / rho;
      for (int i = 0; i < p.m(); ++i) {
        EXPECT_GE(hat.omega[i], 0.0);
        EXPECT_EQ(hat.omega[i] == 0.0, shifted[i] <= 0.0);
      }
    }
  }
}

TEST(Function, SecondOrderTransfer) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(0.0, 3.0);
  for (const std::string& name : list()) {
    const NlpProblem& p = get(name).problem;
    for (int t = 0; t < 20; ++t) {
      const Vector x = random_point(rng, p.n(), 2.0);
      const Vector mu = random_point(rng, p.p(), 1.0);
      Vector om(p.m());
      for (int i = 0; i < p.m(); ++i) om[i] = U(rng);
      const double rho = 20.0;
      const Multipliers hat = internal_multipliers(p, rho, mu, om, x);
      std::vector<int> pos;
      for (int i = 0; i < p.m(); ++i)
        if (hat.omega[i] > 0) pos.push_back(i);
      Matrix rows(p.p() + static_cast<int>(pos.size()), p.n());
      rows.topRows(p.p()) = p.jac_h(x);
      for (size_t r = 0; r < pos.size(); ++r) rows.row(p.p() + static_cast<int>(r)) = p.jac_g(x).row(pos[r]);
      const Matrix Z = nullspace_basis(rows, p.n(), 1e-12);
      if (Z.cols() == 0) continue;
      const Matrix Ha = auglag_hess(p, rho, mu, om, x);
      const Matrix HL = lagrangian_hessian(p, {x, hat.mu, hat.omega});
      for (int s = 0; s < 10; ++s) {
        const Vector d = Z * oracles::random_unit(rng, static_cast<int>(Z.cols()));
        EXPECT_LE(std::abs(d.dot(Ha * d) - d.dot(HL * d)), 1e-9 * std::max(1.0, std::abs(d.dot(HL * d))));
      }
    }
  }
}

TEST(Multipliers, EqconSolutionKeepsMu) {
  const Multipliers m = internal_multipliers(get("eqcon-quad").problem, 1e3, v1(-2.0), Vector(0), v2(1, 1));
  EXPECT_EQ(m.mu[0], -2.0);
}

TEST(Run, EqconSubproblemsMatchClosedForm) {
  const SolverTrace t = run_auglag(get("eqcon-quad").problem, eqcon_params());
  ASSERT_FALSE(t.records.empty());
  for (const TraceRecord& r : t.records) {
    const Vector x = eqcon_subproblem(r.rho, r.mu_safeguarded[0]);
    // gradient <= inner_tol and curvature >= 2 bound the distance
    EXPECT_LE((r.x - x).norm(), r.inner_tol / 2 + 1e-12);
  }
}

TEST(Run, EqconConverges) {
  const SolverTrace t = run_auglag(get("eqcon-quad").problem, eqcon_params());
  EXPECT_EQ(t.status, TraceStatus::kConverged);
  const TraceRecord& last = t.records.back();
  EXPECT_NEAR(last.mu[0], -2.0, 1e-6);
  EXPECT_LE((last.x - v2(1, 1)).norm(), 1e-6);
  ASSERT_GE(t.records.size(), 3u);
  const size_t n = t.records.size();
  EXPECT_EQ(t.records[n - 1].rho, t.records[n - 2].rho);
  EXPECT_EQ(t.records[n - 2].rho, t.records[n - 3].rho);
}

TEST(Run, PenaltyGrowthAndSafeguards) {
  for (const std::string& name : list()) {
    const ProblemEntry& e = get(name);
    if (!e.solver_suited) continue;
    AugLagParams p;
    p.x0 = e.default_start;
    p.mu_min = -3.0;
    p.mu_max = 3.0;
    p.omega_max = 5.0;
    const SolverTrace t = run_auglag(e.problem, p);
    for (size_t i = 0; i < t.records.size(); ++i) {
      const TraceRecord& r = t.records[i];
      if (i > 0) {
        const double prev = t.records[i - 1].rho;
        EXPECT_TRUE(r.rho == prev || r.rho == p.gamma * prev) << name;
      }
      for (int j = 0; j < r.mu_safeguarded.size(); ++j) {
        EXPECT_GE(r.mu_safeguarded[j], p.mu_min);
        EXPECT_LE(r.mu_safeguarded[j], p.mu_max);
      }
      for (int j = 0; j < r.omega_safeguarded.size(); ++j) {
        EXPECT_GE(r.omega_safeguarded[j], 0.0);
        EXPECT_LE(r.omega_safeguarded[j], p.omega_max);
      }
      EXPECT_GE(r.omega.size() ? r.omega.minCoeff() : 0.0, 0.0);
      // records carry the hatted pair
      const Multipliers hat = internal_multipliers(e.problem, r.rho, r.mu_safeguarded, r.omega_safeguarded, r.x);
      EXPECT_EQ(r.mu, hat.mu);
      EXPECT_EQ(r.omega, hat.omega);
    }
  }
}

TEST(Run, ProgressTestControlsPenalty) {
  AugLagParams p = eqcon_params();
  const SolverTrace t = run_auglag(get("eqcon-quad").problem, p);
  double prev = std::max(std::abs(get("eqcon-quad").problem.h(p.x0)[0]), 0.0);
  for (const TraceRecord& r : t.records) {
    const double progress = std::abs(get("eqcon-quad").problem.h(r.x)[0]);
    EXPECT_DOUBLE_EQ(r.extra.at("progress"), progress);
    const double expected = progress <= p.tau * prev ? r.rho : p.gamma * r.rho;
    EXPECT_EQ(r.extra.at("rho_next"), expected);
    prev = progress;
  }
}

TEST(Run, FirstProgressUsesPositivePartOfG) {
  // box-ineq from a start with g(x0) < 0: V^0 = 0, so any later V must be <= 0 to avoid growth.
  const ProblemEntry& e = get("box-ineq");
  AugLagParams p;
  p.x0 = e.default_start;
  p.max_outer = 1;
  const SolverTrace t = run_auglag(e.problem, p);
  ASSERT_EQ(t.records.size(), 1u);
  EXPECT_EQ(t.records[0].extra.at("progress"), 0.0);
  EXPECT_EQ(t.records[0].extra.at("rho_next"), p.rho_1);
}

TEST(Run, InteriorMinimumNeverGrowsPenalty) {
  const NlpProblem& prob = get("saddle-escape").problem;
  AugLagParams p;
  p.x0 = v2(1, 0);
  p.max_outer = 5;
  const SolverTrace t = run_auglag(prob, p);
  for (const TraceRecord& r : t.records) {
    EXPECT_EQ(r.rho, p.rho_1);
    EXPECT_EQ(r.x, p.x0);
    EXPECT_EQ(r.inner->iterations, 0);
  }
  // box-ineq at its minimizer: g = 0 <= 0, V <= 0
  AugLagParams q;
  q.x0 = Vector::Zero(2);
  q.max_outer = 5;
  const SolverTrace u = run_auglag(get("box-ineq").problem, q);
  for (const TraceRecord& r : u.records) EXPECT_EQ(r.rho, q.rho_1);
}

TEST(Run, ConvergesOnSolverSuitedProblems) {
  for (const std::string& name : list()) {
    const ProblemEntry& e = get(name);
    if (!e.solver_suited) continue;
    AugLagParams p;
    p.x0 = e.default_start;
    const SolverTrace t = run_auglag(e.problem, p);
    EXPECT_EQ(t.status, TraceStatus::kConverged) << name << ": " << t.message;
  }
}

TEST(Params, Validation) {
  const NlpProblem& prob = get("eqcon-quad").problem;
  auto bad = [&](auto mutate) {
    AugLagParams q = eqcon_params();
    mutate(q);
    EXPECT_THROW(q.validate(prob), ContractViolation);
  };
  bad([](AugLagParams& q) { q.mu_min = 2; q.mu_max = 1; });
  bad([](AugLagParams& q) { q.omega_max = 0; });
  bad([](AugLagParams& q) { q.gamma = 1; });
  bad([](AugLagParams& q) { q.rho_1 = 0; });
  bad([](AugLagParams& q) { q.tau = 1; });
  bad([](AugLagParams& q) { q.mu1 = v1(1e7); });
  bad([](AugLagParams& q) { q.x0 = v1(0); });
  EXPECT_NO_THROW(eqcon_params().validate(prob));
}
