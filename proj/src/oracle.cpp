#include "sakkt/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include "sakkt/optimality.hpp"

namespace sakkt {

void OracleConfig::validate(const NlpProblem& problem) const {
  if (problem.n() > kOracleMaxDimension) {
    throw UnsupportedScale("ball-constrained global solve supports n <= " +
                           std::to_string(kOracleMaxDimension) + ", problem '" + problem.name() +
                           "' has n = " + std::to_string(problem.n()));
  }
  if (x_bar.size() != problem.n()) throw ContractViolation("x_bar has wrong dimension");
  if (!(delta > 0.0 && delta < 1.0 / 3.0)) throw ContractViolation("delta must lie in (0, 1/3)");
  if (!(rho.initial > 0.0) || !(rho.factor > 1.0)) {
    throw ContractViolation("rho schedule must be positive and strictly increasing");
  }
  if (k_max < 1) throw ContractViolation("k_max must be at least 1");
  if (grid_per_dim < 1 || random_starts < 0) throw ContractViolation("bad multistart settings");
  if (!(inner_tol > 0.0)) throw ContractViolation("inner tolerance must be positive");
  if (jobs < 1) throw ContractViolation("jobs must be at least 1");
}

double regularized_value(const NlpProblem& problem, const Vector& x_bar, double rho, const Vector& x) {
  const double r2 = (x - x_bar).squaredNorm();
  return phi(problem, rho, x) + 0.25 * r2 * r2;
}

Vector regularized_grad(const NlpProblem& problem, const Vector& x_bar, double rho, const Vector& x) {
  const Vector v = x - x_bar;
  return phi_grad(problem, rho, x) + v.squaredNorm() * v;
}

Matrix regularized_hess(const NlpProblem& problem, const Vector& x_bar, double rho, const Vector& x) {
  const Vector v = x - x_bar;
  const int n = static_cast<int>(x.size());
  return phi_hess(problem, rho, x) + 2.0 * v * v.transpose() + v.squaredNorm() * Matrix::Identity(n, n);
}

namespace {

std::vector<Vector> multistart_seeds(const OracleConfig& cfg) {
  const int n = static_cast<int>(cfg.x_bar.size());
  const double reach = 0.99 * cfg.delta;
  std::vector<Vector> seeds{cfg.x_bar};

  std::vector<int> idx(n, 0);
  const int g = cfg.grid_per_dim;
  for (;;) {
    Vector offset(n);
    for (int c = 0; c < n; ++c) {
      offset[c] = g == 1 ? 0.0 : reach * (-1.0 + 2.0 * idx[c] / (g - 1));
    }
    const double norm = offset.norm();
    if (norm > reach) offset *= reach / norm;
    seeds.push_back(cfg.x_bar + offset);
    int c = 0;
    while (c < n && ++idx[c] == g) idx[c++] = 0;
    if (c == n) break;
  }

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (int s = 0; s < cfg.random_starts; ++s) {
    Vector dir(n);
    for (int c = 0; c < n; ++c) dir[c] = normal(rng);
    const double norm = dir.norm();
    if (norm == 0.0) continue;
    seeds.push_back(cfg.x_bar + dir * (reach * std::pow(uniform(rng), 1.0 / n) / norm));
  }
  return seeds;
}

struct LocalResult {
  Vector x;
  double value = 0.0;
  bool converged = false;
};

/// Newton iterations on grad F = 0 while the gradient norm drops. Near a
/// minimizer the value differences sink below roundoff long before the
/// gradient does, so the trust-region acceptance test stops early.
LocalResult polish(const SmoothFunctionOracle& oracle, const TrustRegionResult& tr, const OracleConfig& cfg) {
  LocalResult out{tr.x_final, tr.value, false};
  Vector grad = oracle.gradient(out.x);
  for (int it = 0; it < 50 && grad.norm() > cfg.inner_tol; ++it) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(oracle.hessian(out.x));
    if (eig.eigenvalues()[0] <= 0.0) break;
    const Vector trial = out.x - eig.eigenvectors() *
                                     (eig.eigenvectors().transpose() * grad).cwiseQuotient(eig.eigenvalues());
    if ((trial - cfg.x_bar).norm() > cfg.delta) break;
    const Vector trial_grad = oracle.gradient(trial);
    if (!(trial_grad.norm() < grad.norm())) break;
    out.x = trial;
    grad = trial_grad;
  }
  out.value = oracle.value(out.x);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(oracle.hessian(out.x), Eigen::EigenvaluesOnly);
  out.converged = grad.norm() <= cfg.inner_tol && eig.eigenvalues()[0] >= -cfg.inner_tol;
  return out;
}

bool better(const LocalResult& a, const LocalResult& b) {
  if (a.value != b.value) return a.value < b.value;
  return std::lexicographical_compare(a.x.data(), a.x.data() + a.x.size(), b.x.data(), b.x.data() + b.x.size());
}

}  // namespace

BallSolution solve_global_in_ball(const NlpProblem& problem, const OracleConfig& cfg, double rho) {
  cfg.validate(problem);
  if (!(rho > 0.0)) throw ContractViolation("penalty parameter must be positive");

  const Vector& x_bar = cfg.x_bar;
  const SmoothFunctionOracle oracle{
      [&](const Vector& x) { return regularized_value(problem, x_bar, rho, x); },
      [&](const Vector& x) { return regularized_grad(problem, x_bar, rho, x); },
      [&](const Vector& x) { return regularized_hess(problem, x_bar, rho, x); }};
  TrustRegionOptions opts;
  opts.initial_radius = 0.5 * cfg.delta;
  opts.max_radius = 2.0 * cfg.delta;
  opts.region = [&](const Vector& x) { return (x - x_bar).norm() <= cfg.delta; };

  const std::vector<Vector> seeds = multistart_seeds(cfg);
  std::vector<LocalResult> results(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        results[i] = polish(oracle, minimize_second_order(oracle, seeds[i], cfg.inner_tol, opts), cfg);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::min<int>(cfg.jobs, static_cast<int>(seeds.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i) {
    if (better(results[i], results[best])) best = i;
  }
  BallSolution out;
  out.x = results[best].x;
  out.value = results[best].value;
  out.converged = results[best].converged;
  out.on_boundary = (out.x - x_bar).norm() >= cfg.delta * (1.0 - 1e-8);
  out.starts = static_cast<int>(seeds.size());
  return out;
}

SolverTrace necessity_sequence(const NlpProblem& problem, const OracleConfig& cfg) {
  cfg.validate(problem);
  SolverTrace trace;
  trace.problem = problem.name();
  trace.method = "oracle";
  trace.origin = "oracle";
  trace.params = {{"delta", cfg.delta},
                  {"rho0", cfg.rho.initial},
                  {"gamma", cfg.rho.factor},
                  {"k_max", cfg.k_max},
                  {"grid_per_dim", cfg.grid_per_dim},
                  {"random_starts", cfg.random_starts},
                  {"seed", static_cast<double>(cfg.seed)},
                  {"inner_tol", cfg.inner_tol}};
  trace.vectors["x_bar"] = cfg.x_bar;
  trace.vectors["x_star"] = cfg.x_bar;

  const FeasibilityMeasure bar_feas = feasibility(problem, cfg.x_bar);
  const bool bar_feasible = bar_feas.eq_norm == 0.0 && bar_feas.ineq_norm == 0.0;
  const double f_bar = problem.f(cfg.x_bar);
  trace.params["f_bar"] = f_bar;

  trace.status = TraceStatus::kConverged;
  for (int k = 0; k < cfg.k_max; ++k) {
    const double rho = cfg.rho.at(k);
    BallSolution sol;
    try {
      sol = solve_global_in_ball(problem, cfg, rho);
    } catch (const EvaluationError& e) {
      trace.status = TraceStatus::kFailed;
      trace.message = "k = " + std::to_string(k) + ": " + e.what();
      break;
    }

    TraceRecord rec;
    rec.k = k;
    rec.x = sol.x;
    Multipliers mult = recover_multipliers(problem, rho, sol.x);
    rec.mu = std::move(mult.mu);
    rec.omega = std::move(mult.omega);
    rec.rho = rho;
    rec.feasibility = feasibility(problem, sol.x);
    rec.residuals = akkt_residuals(problem, {rec.x, rec.mu, rec.omega});

    const double dist = (sol.x - cfg.x_bar).norm();
    rec.eps = std::max({dist, rec.feasibility.eq_norm, rec.feasibility.ineq_norm, 1e-16});
    rec.inner_tol = cfg.inner_tol;

    const double dist_cubed = dist * dist * dist;
    rec.extra["F"] = sol.value;
    rec.extra["dist"] = dist;
    rec.extra["dist_cubed"] = dist_cubed;
    rec.extra["identity_gap"] = std::abs(rec.residuals.grad - dist_cubed);

    const CriticalSpaceSpec space =
        build_space(problem, SpaceKind::kSTilde, rec.x, cfg.x_bar, rec.omega, 1e-6, 0.0);
    const SecondOrderCertificate cert = second_order_subspace(
        lagrangian_hessian(problem, {rec.x, rec.mu, rec.omega}),
        nullspace_basis(space.eq_rows, problem.n(), 1e-10), rec.eps);
    rec.extra["s_tilde_lambda_min"] = cert.lambda_min;
    rec.extra["curvature_floor"] = -3.0 * dist * dist;

    if (sol.on_boundary) rec.flags.push_back("boundary");
    if (!sol.converged) rec.flags.push_back("not_converged");
    if (dist <= cfg.delta && dist_cubed > rec.eps) rec.flags.push_back("cubic_bound_violated");
    if (bar_feasible && sol.value > f_bar + 1e-12 * std::max(1.0, std::abs(f_bar))) {
      rec.flags.push_back("F_above_f_bar");
    }
    if (!trace.records.empty() && rec.eps > trace.records.back().eps) rec.flags.push_back("eps_increased");
    trace.records.push_back(std::move(rec));
  }
  return trace;
}

}  // namespace sakkt
