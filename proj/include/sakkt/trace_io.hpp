#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "sakkt/nlp.hpp"
#include "sakkt/optimality.hpp"
#include "sakkt/trace.hpp"

namespace sakkt {

inline constexpr const char* kTraceSchema = "sakkt-trace/1";

/// Malformed trace file or one that does not fit the named problem.
class TraceSchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One JSON header line, then one line per record. Finite numbers are
/// written with shortest round-trip digits; inf and nan as strings.
void write_trace(std::ostream& out, const SolverTrace& trace);
SolverTrace read_trace(std::istream& in);

void save_trace(const std::string& path, const SolverTrace& trace);
SolverTrace load_trace(const std::string& path);

/// Problem name, vector dimensions and strictly increasing k.
void validate_trace(const SolverTrace& trace, const NlpProblem& problem);

/// key: value lines in a fixed order, numbers with 17 significant digits.
std::string format_report(const ConditionReport& report);

}  // namespace sakkt
