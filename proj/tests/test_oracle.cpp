#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sakkt/optimality.hpp"
#include "sakkt/oracle.hpp"
#include "sakkt/problemlib.hpp"

using namespace sakkt;

namespace {

Vector v1(double a) { return Vector::Constant(1, a); }
Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

OracleConfig config(const Vector& x_bar) {
  OracleConfig c;
  c.x_bar = x_bar;
  return c;
}

}  // namespace

TEST(Regularized, AtCentreEqualsPenalty) {
  const NlpProblem& p = get("mixed-active").problem;
  const Vector xb = (Vector(3) << 0.4, 1.0, -2.0).finished();
  EXPECT_EQ(regularized_value(p, xb, 5.0, xb), phi(p, 5.0, xb));
  EXPECT_EQ(regularized_grad(p, xb, 5.0, xb), phi_grad(p, 5.0, xb));
}

TEST(Regularized, FeasibleCentreGivesObjective) {
  const NlpProblem& p = get("example-s3").problem;
  const Vector xb = v2(1.0, 0.5);
  EXPECT_EQ(regularized_value(p, xb, 1e8, xb), p.f(xb));
}

TEST(Regularized, DerivativesMatchDifferences) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> N(0.0, 0.3);
  for (const std::string& name : list()) {
    const NlpProblem& p = get(name).problem;
    const Vector xb = get(name).reference_point;
    for (int t = 0; t < 10; ++t) {
      Vector x = xb;
      for (int i = 0; i < p.n(); ++i) x[i] += N(rng);
      const Vector fd = oracles::fd_gradient([&](const Vector& y) { return regularized_value(p, xb, 2.0, y); }, x);
      const Vector g = regularized_grad(p, xb, 2.0, x);
      EXPECT_LE((fd - g).norm(), 1e-6 * (1 + g.norm())) << name;
      const Matrix fh = oracles::fd_hessian([&](const Vector& y) { return regularized_grad(p, xb, 2.0, y); }, x);
      EXPECT_LE((fh - regularized_hess(p, xb, 2.0, x)).norm(), 1e-6 * (1 + fh.norm())) << name;
      // regularizer gradient is |x - xb|^2 (x - xb)
      const Vector d = x - xb;
      EXPECT_LE((g - phi_grad(p, 2.0, x) - d.squaredNorm() * d).norm(), 1e-12 * (1 + g.norm()));
    }
  }
}

TEST(Ball, MfcqMatchesBisection) {
  const NlpProblem& p = get("mfcq-fail").problem;
  const OracleConfig cfg = config(v1(0.0));
  for (int k = 0; k < cfg.k_max; ++k) {
    const double rho = cfg.rho.at(k);
    const BallSolution s = solve_global_in_ball(p, cfg, rho);
    const double x = oracles::mfcq_ball_minimizer(rho, cfg.delta);
    EXPECT_NEAR(s.x[0], x, 1e-10);
    EXPECT_NEAR(s.value, oracles::mfcq_F(rho, x), 1e-12);
    EXPECT_TRUE(s.converged);
    EXPECT_FALSE(s.on_boundary);
  }
}

TEST(Ball, ExampleAtMostGridMinimum) {
  const NlpProblem& p = get("example-s3").problem;
  const OracleConfig cfg = config(Vector::Zero(2));
  for (int k = 0; k < 3; ++k) {
    const double rho = cfg.rho.at(k);
    const BallSolution s = solve_global_in_ball(p, cfg, rho);
    const oracles::GridResult g = oracles::disc_grid_minimum(
        [&](const Vector& x) { return regularized_value(p, cfg.x_bar, rho, x); }, cfg.x_bar, cfg.delta);
    EXPECT_LE(s.value, g.value + 1e-8);
    EXPECT_LE((s.x - cfg.x_bar).norm(), cfg.delta * (1 + 1e-12));
  }
}

TEST(Ball, ExampleMatchesProfileOracle) {
  const NlpProblem& p = get("example-s3").problem;
  const OracleConfig cfg = config(Vector::Zero(2));
  for (int k = 0; k < cfg.k_max; ++k) {
    const double rho = cfg.rho.at(k);
    const BallSolution s = solve_global_in_ball(p, cfg, rho);
    const oracles::GridResult o = oracles::example_ball_minimum(rho, cfg.delta);
    EXPECT_NEAR(oracles::example_F(rho, o.x[0], o.x[1]), regularized_value(p, cfg.x_bar, rho, o.x), 1e-15);
    EXPECT_NEAR(s.value, o.value, 1e-8) << "rho=" << rho;
    EXPECT_LE(s.value, o.value + 1e-12) << "rho=" << rho;
  }
}

TEST(Ball, ConvexInteriorFromAllStarts) {
  const NlpProblem& p = get("box-ineq").problem;
  OracleConfig cfg = config(v2(0.1, 0.05));
  cfg.random_starts = 40;
  const BallSolution s = solve_global_in_ball(p, cfg, 10.0);
  // F = |x|^2 + (rho/4) max(0,-x1)^4 + |x - xb|^4 / 4 is strictly convex
  EXPECT_TRUE(s.converged);
  EXPECT_LE(regularized_grad(p, cfg.x_bar, 10.0, s.x).norm(), 1e-10);
  EXPECT_EQ(s.starts, 1 + 25 + 40);
}

TEST(Ball, DimensionCap) {
  ScalarFunction f{[](const Vector& x) { return x.squaredNorm(); }, [](const Vector& x) { return (2 * x).eval(); },
                   [](const Vector& x) { return (2 * Matrix::Identity(x.size(), x.size())).eval(); }};
  NlpProblem big("big", 5, f);
  EXPECT_THROW(solve_global_in_ball(big, config(Vector::Zero(5)), 10.0), UnsupportedScale);
  NlpProblem ok("ok", 4, f);
  OracleConfig c = config(Vector::Zero(4));
  c.grid_per_dim = 2;
  EXPECT_NO_THROW(solve_global_in_ball(ok, c, 10.0));
}

TEST(Config, DeltaRange) {
  const NlpProblem& p = get("mfcq-fail").problem;
  for (double d : {0.0, -0.1, 1.0 / 3.0, 0.4}) {
    OracleConfig c = config(v1(0.0));
    c.delta = d;
    EXPECT_THROW(c.validate(p), ContractViolation) << d;
  }
  OracleConfig c = config(v2(0, 0));
  EXPECT_THROW(c.validate(p), ContractViolation);
  c = config(v1(0.0));
  c.jobs = 0;
  EXPECT_THROW(c.validate(p), ContractViolation);
  EXPECT_NO_THROW(config(v1(0.0)).validate(p));
}

TEST(Sequence, MfcqIdentityAndCertificate) {
  const NlpProblem& p = get("mfcq-fail").problem;
  const OracleConfig cfg = config(v1(0.0));
  const SolverTrace t = necessity_sequence(p, cfg);
  EXPECT_EQ(t.origin, "oracle");
  ASSERT_EQ(static_cast<int>(t.records.size()), cfg.k_max);
  for (const TraceRecord& r : t.records) {
    const double dist = (r.x - cfg.x_bar).norm();
    EXPECT_NEAR(r.residuals.grad, dist * dist * dist, 1e-10);
    EXPECT_DOUBLE_EQ(r.eps, std::max({dist, r.residuals.eq, r.residuals.ineq, 1e-16}));
    EXPECT_LE(r.extra.at("F"), p.f(cfg.x_bar) + 1e-15);
    EXPECT_GE(r.extra.at("s_tilde_lambda_min"), r.extra.at("curvature_floor"));
    EXPECT_LE(dist * dist * dist, r.eps);
    EXPECT_TRUE(r.flags.empty()) << r.k;
  }
  for (size_t i = 1; i < t.records.size(); ++i) EXPECT_LT(t.records[i].eps, t.records[i - 1].eps);
  const ConditionReport rep = certify_trace(p, t, cfg.x_bar, Condition::kSSakkt2);
  EXPECT_EQ(rep.verdict, Verdict::kPass) << rep.reason;
}

TEST(Sequence, ExampleIdentity) {
  const NlpProblem& p = get("example-s3").problem;
  const OracleConfig cfg = config(Vector::Zero(2));
  const SolverTrace t = necessity_sequence(p, cfg);
  for (const TraceRecord& r : t.records) {
    const double dist = (r.x - cfg.x_bar).norm();
    const Vector lg = lagrangian_gradient(p, {r.x, r.mu, r.omega});
    EXPECT_NEAR(lg.norm(), dist * dist * dist, 1e-10);
    EXPECT_GE(r.extra.at("s_tilde_lambda_min"), -3 * dist * dist - 1e-12);
  }
  EXPECT_EQ(certify_trace(p, t, cfg.x_bar, Condition::kSSakkt2).verdict, Verdict::kPass);
}

TEST(Sequence, InteriorMinimumStaysAtCentre) {
  const NlpProblem& p = get("saddle-escape").problem;
  const OracleConfig cfg = config(v2(1, 0));
  const SolverTrace t = necessity_sequence(p, cfg);
  for (const TraceRecord& r : t.records) {
    EXPECT_LE((r.x - cfg.x_bar).norm(), 1e-12);
    EXPECT_GE(r.eps, 1e-16);
    EXPECT_GT(r.eps, 0.0);
  }
}

TEST(Sequence, JobsDoNotChangeResult) {
  const NlpProblem& p = get("example-s3").problem;
  OracleConfig a = config(Vector::Zero(2));
  a.k_max = 3;
  OracleConfig b = a;
  b.jobs = 4;
  SolverTrace ta = necessity_sequence(p, a), tb = necessity_sequence(p, b);
  ta.params.erase("jobs");
  tb.params.erase("jobs");
  EXPECT_TRUE(ta == tb);
}
