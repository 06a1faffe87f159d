#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sakkt/nlp.hpp"
#include "sakkt/trust_region.hpp"

namespace sakkt {

/// Euclidean norms of the four AKKT quantities at (x, mu, omega).
struct AkktResiduals {
  double grad = 0.0;  // ||grad_x L(x, mu, omega)||
  double eq = 0.0;    // ||h(x)||
  double ineq = 0.0;  // ||max{0, g(x)}||
  double comp = 0.0;  // ||min{omega, -g(x)}||

  double max() const { return std::max(std::max(grad, eq), std::max(ineq, comp)); }
  bool operator==(const AkktResiduals&) const = default;
};

struct InnerStats {
  int iterations = 0;
  TrustRegionStatus status = TrustRegionStatus::kConverged;
  double grad_norm = 0.0;
  double hess_min_eig = 0.0;
  /// Accepted inner values were non-increasing.
  bool descent_ok = true;

  bool operator==(const InnerStats&) const = default;
};

/// Start rule chosen by the modified penalty method after iterate k.
enum class StartBranch { kNone, kWarm, kReset };

std::string to_string(StartBranch branch);

struct TraceRecord {
  int k = 0;
  Vector x;
  Vector mu;
  Vector omega;
  /// Tolerance of the certified sequence: bounds all four AKKT residuals
  /// and the second-order slack at this record.
  double eps = 0.0;
  /// Inner stopping tolerance handed to the subproblem solver.
  double inner_tol = 0.0;
  double rho = 0.0;
  AkktResiduals residuals;
  FeasibilityMeasure feasibility;
  std::optional<InnerStats> inner;
  StartBranch branch = StartBranch::kNone;
  /// Safeguarded multipliers of the augmented Lagrangian (empty otherwise).
  Vector mu_safeguarded;
  Vector omega_safeguarded;
  /// Method-specific scalars, e.g. the merit value.
  std::map<std::string, double> extra;
  std::vector<std::string> flags;

  bool has_flag(const std::string& flag) const;
};

enum class TraceStatus { kConverged, kMaxOuter, kFailed };

std::string to_string(TraceStatus status);

struct SolverTrace {
  std::string problem;
  std::string method;
  std::string origin = "solver";
  TraceStatus status = TraceStatus::kMaxOuter;
  std::string message;
  std::map<std::string, double> params;
  std::map<std::string, Vector> vectors;
  std::vector<TraceRecord> records;
};

bool operator==(const TraceRecord& a, const TraceRecord& b);
bool operator==(const SolverTrace& a, const SolverTrace& b);

}  // namespace sakkt
