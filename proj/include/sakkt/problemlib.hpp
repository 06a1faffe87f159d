#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sakkt/nlp.hpp"
#include "sakkt/trace.hpp"

namespace sakkt {

struct ProblemEntry {
  ProblemEntry(std::string name_, std::string description_, NlpProblem problem_)
      : name(std::move(name_)), description(std::move(description_)), problem(std::move(problem_)) {}

  std::string name;
  std::string description;
  NlpProblem problem;
  /// Known local minimizers, feasible to 1e-12.
  std::vector<Vector> minimizers;
  /// KKT triples with AKKT residuals <= 1e-10.
  std::vector<KktTriple> kkt_triples;
  /// Constraint qualification remarks; documentation only.
  std::string cq_notes;
  /// A feasible starting point.
  Vector default_start;
  /// The point the reference data is centred on.
  Vector reference_point;
  /// False when penalty subproblems are unbounded below.
  bool solver_suited = true;
  /// Global minimizer of phi_rho, where known in closed form.
  std::function<Vector(double rho)> penalty_closed_form;
  /// Reference sequence for k in [k_first, k_last].
  std::function<SolverTrace(int k_first, int k_last)> reference_trace;
};

/// Throws NotFoundError listing the registered names.
const ProblemEntry& get(const std::string& name);

/// Registered names, sorted.
std::vector<std::string> list();

}  // namespace sakkt
