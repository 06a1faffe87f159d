#include "sakkt/trace.hpp"

#include <algorithm>

namespace sakkt {

std::string to_string(StartBranch branch) {
  switch (branch) {
    case StartBranch::kNone: return "none";
    case StartBranch::kWarm: return "warm";
    case StartBranch::kReset: return "reset";
  }
  return "none";
}

std::string to_string(TraceStatus status) {
  switch (status) {
    case TraceStatus::kConverged: return "converged";
    case TraceStatus::kMaxOuter: return "max_outer";
    case TraceStatus::kFailed: return "failed";
  }
  return "failed";
}

bool TraceRecord::has_flag(const std::string& flag) const {
  return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

namespace {

bool same(const Vector& a, const Vector& b) {
  return a.size() == b.size() && std::equal(a.data(), a.data() + a.size(), b.data());
}

}  // namespace

bool operator==(const TraceRecord& a, const TraceRecord& b) {
  return a.k == b.k && same(a.x, b.x) && same(a.mu, b.mu) && same(a.omega, b.omega) && a.eps == b.eps &&
         a.inner_tol == b.inner_tol && a.rho == b.rho && a.residuals == b.residuals &&
         a.feasibility == b.feasibility && a.inner == b.inner && a.branch == b.branch &&
         same(a.mu_safeguarded, b.mu_safeguarded) && same(a.omega_safeguarded, b.omega_safeguarded) &&
         a.extra == b.extra && a.flags == b.flags;
}

bool operator==(const SolverTrace& a, const SolverTrace& b) {
  if (a.problem != b.problem || a.method != b.method || a.origin != b.origin || a.status != b.status ||
      a.message != b.message || a.params != b.params || a.records != b.records) {
    return false;
  }
  if (a.vectors.size() != b.vectors.size()) return false;
  for (const auto& [key, v] : a.vectors) {
    auto it = b.vectors.find(key);
    if (it == b.vectors.end() || !same(v, it->second)) return false;
  }
  return true;
}

}  // namespace sakkt
