#include "sakkt/problemlib.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "sakkt/optimality.hpp"

namespace sakkt {

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

/// a'x + b
ScalarFunction affine(Vector a, double b) {
  const int n = static_cast<int>(a.size());
  return {[a, b](const Vector& x) { return a.dot(x) + b; },
          [a](const Vector&) { return a; },
          [n](const Vector&) { return Matrix::Zero(n, n).eval(); }};
}

/// x'Qx/2 + c'x + b with Q symmetric.
ScalarFunction quadratic(Matrix Q, Vector c, double b) {
  return {[Q, c, b](const Vector& x) { return 0.5 * x.dot(Q * x) + c.dot(x) + b; },
          [Q, c](const Vector& x) { return (Q * x + c).eval(); },
          [Q](const Vector&) { return Q; }};
}

std::vector<ProblemEntry> build() {
  std::vector<ProblemEntry> entries;

  {
    NlpProblem p("example-s3", 2, quadratic(vec({2.0, -2.0}).asDiagonal(), Vector::Zero(2), 0.0), {},
                 {affine(vec({-1.0, 1.0}), 0.0), affine(vec({0.0, -1.0}), 0.0)});
    ProblemEntry e{"example-s3",
                   "min x1^2 - x2^2 s.t. -x1 + x2 <= 0, -x2 <= 0; AKKT and cone-SAKKT2 hold at 0, "
                   "subspace-SAKKT2 does not",
                   std::move(p)};
    e.minimizers = {Vector::Zero(2)};
    e.kkt_triples = {{Vector::Zero(2), Vector(0), Vector::Zero(2)}};
    e.cq_notes = "linear constraints: LICQ holds at 0; the sequence (1/k, 1/k) approaches along the face g1 = 0";
    e.default_start = vec({1.0, 0.5});
    e.reference_point = Vector::Zero(2);
    e.solver_suited = false;
    e.reference_trace = [](int k_first, int k_last) {
      const NlpProblem& problem = get("example-s3").problem;
      if (k_first < 1 || k_last < k_first) throw ContractViolation("reference range must satisfy 1 <= first <= last");
      SolverTrace t;
      t.problem = "example-s3";
      t.method = "reference";
      t.origin = "reference";
      t.status = TraceStatus::kConverged;
      t.params = {{"k_first", k_first}, {"k_last", k_last}};
      t.vectors["x_star"] = Vector::Zero(2);
      for (int k = k_first; k <= k_last; ++k) {
        TraceRecord r;
        r.k = k;
        r.x = Vector::Constant(2, 1.0 / k);
        r.mu = Vector(0);
        r.omega = Vector::Zero(2);
        r.eps = 4.0 / k;
        r.inner_tol = r.eps;
        r.residuals = akkt_residuals(problem, {r.x, r.mu, r.omega});
        r.feasibility = feasibility(problem, r.x);
        t.records.push_back(std::move(r));
      }
      return t;
    };
    entries.push_back(std::move(e));
  }

  {
    ScalarFunction square{[](const Vector& x) { return x[0] * x[0]; },
                          [](const Vector& x) { return Vector::Constant(1, 2.0 * x[0]).eval(); },
                          [](const Vector&) { return Matrix::Constant(1, 1, 2.0).eval(); }};
    NlpProblem p("mfcq-fail", 1, affine(vec({1.0}), 0.0), {}, {square});
    ProblemEntry e{"mfcq-fail", "min x s.t. x^2 <= 0; feasible set {0}, no KKT point", std::move(p)};
    e.minimizers = {Vector::Zero(1)};
    e.cq_notes = "grad g(0) = 0: MFCQ fails, no multiplier exists at the minimizer";
    e.default_start = Vector::Zero(1);
    e.reference_point = Vector::Zero(1);
    e.penalty_closed_form = [](double rho) { return Vector::Constant(1, -std::pow(2.0 * rho, -1.0 / 7.0)).eval(); };
    entries.push_back(std::move(e));
  }

  {
    NlpProblem p("eqcon-quad", 2, quadratic(2.0 * Matrix::Identity(2, 2), Vector::Zero(2), 0.0),
                 {affine(vec({1.0, 1.0}), -2.0)});
    ProblemEntry e{"eqcon-quad", "min x1^2 + x2^2 s.t. x1 + x2 = 2; solution (1, 1), mu = -2", std::move(p)};
    e.minimizers = {vec({1.0, 1.0})};
    e.kkt_triples = {{vec({1.0, 1.0}), vec({-2.0}), Vector(0)}};
    e.cq_notes = "linear equality: LICQ everywhere";
    e.default_start = vec({2.0, 0.0});
    e.reference_point = vec({1.0, 1.0});
    e.penalty_closed_form = [](double rho) { return Vector::Constant(2, rho / (1.0 + rho)).eval(); };
    entries.push_back(std::move(e));
  }

  {
    ScalarFunction f{[](const Vector& x) {
                       const double a = x[0] * x[0] - 1.0;
                       return a * a + x[1] * x[1];
                     },
                     [](const Vector& x) { return vec({4.0 * x[0] * (x[0] * x[0] - 1.0), 2.0 * x[1]}); },
                     [](const Vector& x) {
                       Matrix H = Matrix::Zero(2, 2);
                       H(0, 0) = 12.0 * x[0] * x[0] - 4.0;
                       H(1, 1) = 2.0;
                       return H;
                     }};
    NlpProblem p("saddle-escape", 2, f);
    ProblemEntry e{"saddle-escape", "unconstrained (x1^2 - 1)^2 + x2^2; saddle at 0, minima (+-1, 0)",
                   std::move(p)};
    e.minimizers = {vec({-1.0, 0.0}), vec({1.0, 0.0})};
    e.kkt_triples = {{vec({-1.0, 0.0}), Vector(0), Vector(0)}, {vec({1.0, 0.0}), Vector(0), Vector(0)}};
    e.cq_notes = "unconstrained";
    e.default_start = Vector::Zero(2);
    e.reference_point = vec({1.0, 0.0});
    entries.push_back(std::move(e));
  }

  {
    NlpProblem p("box-ineq", 2, quadratic(2.0 * Matrix::Identity(2, 2), Vector::Zero(2), 0.0), {},
                 {affine(vec({-1.0, 0.0}), 0.0)});
    ProblemEntry e{"box-ineq", "min x1^2 + x2^2 s.t. -x1 <= 0; weakly active bound, omega = 0", std::move(p)};
    e.minimizers = {Vector::Zero(2)};
    e.kkt_triples = {{Vector::Zero(2), Vector(0), Vector::Zero(1)}};
    e.cq_notes = "linear bound: LICQ; strict complementarity fails at 0";
    e.default_start = vec({1.0, 1.0});
    e.reference_point = Vector::Zero(2);
    entries.push_back(std::move(e));
  }

  {
    ScalarFunction g{[](const Vector& x) { return 4.0 - x[0] * x[0]; },
                     [](const Vector& x) { return vec({-2.0 * x[0], 0.0, 0.0}); },
                     [](const Vector&) {
                       Matrix H = Matrix::Zero(3, 3);
                       H(0, 0) = -2.0;
                       return H;
                     }};
    NlpProblem p("mixed-active", 3, quadratic(2.0 * Matrix::Identity(3, 3), Vector::Zero(3), 0.0),
                 {affine(vec({1.0, 1.0, 1.0}), -3.0)}, {g});
    ProblemEntry e{"mixed-active",
                   "min ||x||^2 in R^3 s.t. x1 + x2 + x3 = 3, 4 - x1^2 <= 0; both constraints active at "
                   "(2, 0.5, 0.5)",
                   std::move(p)};
    e.minimizers = {vec({2.0, 0.5, 0.5}), vec({-2.0, 2.5, 2.5})};
    e.kkt_triples = {{vec({2.0, 0.5, 0.5}), vec({-1.0}), vec({0.75})},
                     {vec({-2.0, 2.5, 2.5}), vec({-5.0}), vec({2.25})}};
    e.cq_notes = "LICQ at both minimizers; strict complementarity holds";
    e.default_start = vec({3.0, 0.0, 0.0});
    e.reference_point = vec({2.0, 0.5, 0.5});
    entries.push_back(std::move(e));
  }

  {
    NlpProblem p("circle-eq", 2, affine(vec({1.0, 1.0}), 0.0),
                 {quadratic(2.0 * Matrix::Identity(2, 2), Vector::Zero(2), -2.0)});
    ProblemEntry e{"circle-eq", "min x1 + x2 s.t. x1^2 + x2^2 = 2; solution (-1, -1), mu = 1/2",
                   std::move(p)};
    e.minimizers = {vec({-1.0, -1.0})};
    e.kkt_triples = {{vec({-1.0, -1.0}), vec({0.5}), Vector(0)}};
    e.cq_notes = "LICQ on the whole circle";
    e.default_start = vec({std::sqrt(2.0), 0.0});
    e.reference_point = vec({-1.0, -1.0});
    entries.push_back(std::move(e));
  }

  std::sort(entries.begin(), entries.end(),
            [](const ProblemEntry& a, const ProblemEntry& b) { return a.name < b.name; });
  return entries;
}

const std::vector<ProblemEntry>& registry() {
  static const std::vector<ProblemEntry> entries = build();
  return entries;
}

}  // namespace

const ProblemEntry& get(const std::string& name) {
  for (const auto& e : registry()) {
    if (e.name == name) return e;
  }
  std::string names;
  for (const auto& e : registry()) names += (names.empty() ? "" : ", ") + e.name;
  throw NotFoundError("unknown problem '" + name + "'; available: " + names);
}

std::vector<std::string> list() {
  std::vector<std::string> names;
  for (const auto& e : registry()) names.push_back(e.name);
  return names;
}

}  // namespace sakkt
