#include "sakkt/trace_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace sakkt {

using nlohmann::json;

namespace {

json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double to_num(const json& j, const char* what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw TraceSchemaError(std::string("field '") + what + "' is not a number");
}

json vec(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v[i]));
  return a;
}

Vector to_vec(const json& j, const char* what) {
  if (!j.is_array()) throw TraceSchemaError(std::string("field '") + what + "' is not an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = to_num(j[i], what);
  return v;
}

const json& field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw TraceSchemaError(std::string("missing field '") + key + "'");
  return *it;
}

json num_map(const std::map<std::string, double>& m) {
  json o = json::object();
  for (const auto& [k, v] : m) o[k] = num(v);
  return o;
}

std::map<std::string, double> to_num_map(const json& j, const char* what) {
  if (!j.is_object()) throw TraceSchemaError(std::string("field '") + what + "' is not an object");
  std::map<std::string, double> m;
  for (auto it = j.begin(); it != j.end(); ++it) m[it.key()] = to_num(it.value(), what);
  return m;
}

TraceStatus parse_status(const std::string& s) {
  for (TraceStatus t : {TraceStatus::kConverged, TraceStatus::kMaxOuter, TraceStatus::kFailed}) {
    if (to_string(t) == s) return t;
  }
  throw TraceSchemaError("unknown status '" + s + "'");
}

StartBranch parse_branch(const std::string& s) {
  for (StartBranch b : {StartBranch::kNone, StartBranch::kWarm, StartBranch::kReset}) {
    if (to_string(b) == s) return b;
  }
  throw TraceSchemaError("unknown branch '" + s + "'");
}

TrustRegionStatus parse_tr_status(const std::string& s) {
  for (TrustRegionStatus t :
       {TrustRegionStatus::kConverged, TrustRegionStatus::kIterationLimit, TrustRegionStatus::kStalled,
        TrustRegionStatus::kPrecisionLimit}) {
    if (to_string(t) == s) return t;
  }
  throw TraceSchemaError("unknown inner status '" + s + "'");
}

json record_json(const TraceRecord& r) {
  json j;
  j["k"] = r.k;
  j["x"] = vec(r.x);
  j["mu"] = vec(r.mu);
  j["omega"] = vec(r.omega);
  j["eps"] = num(r.eps);
  j["inner_tol"] = num(r.inner_tol);
  j["rho"] = num(r.rho);
  j["residuals"] = json::array({num(r.residuals.grad), num(r.residuals.eq), num(r.residuals.ineq),
                                num(r.residuals.comp)});
  j["feasibility"] = json::array({num(r.feasibility.eq_norm), num(r.feasibility.ineq_norm),
                                  num(r.feasibility.eq_sq_sum), num(r.feasibility.ineq_viol_sum)});
  if (r.inner) {
    j["inner"] = {{"iterations", r.inner->iterations},
                  {"status", to_string(r.inner->status)},
                  {"grad_norm", num(r.inner->grad_norm)},
                  {"hess_min_eig", num(r.inner->hess_min_eig)},
                  {"descent_ok", r.inner->descent_ok}};
  } else {
    j["inner"] = nullptr;
  }
  j["branch"] = to_string(r.branch);
  j["mu_safeguarded"] = vec(r.mu_safeguarded);
  j["omega_safeguarded"] = vec(r.omega_safeguarded);
  j["extra"] = num_map(r.extra);
  j["flags"] = r.flags;
  return j;
}

TraceRecord parse_record(const json& j) {
  TraceRecord r;
  const json& k = field(j, "k");
  if (!k.is_number_integer()) throw TraceSchemaError("field 'k' is not an integer");
  r.k = k.get<int>();
  r.x = to_vec(field(j, "x"), "x");
  r.mu = to_vec(field(j, "mu"), "mu");
  r.omega = to_vec(field(j, "omega"), "omega");
  r.eps = to_num(field(j, "eps"), "eps");
  r.inner_tol = to_num(field(j, "inner_tol"), "inner_tol");
  r.rho = to_num(field(j, "rho"), "rho");
  const Vector res = to_vec(field(j, "residuals"), "residuals");
  if (res.size() != 4) throw TraceSchemaError("field 'residuals' must hold 4 numbers");
  r.residuals = {res[0], res[1], res[2], res[3]};
  const Vector feas = to_vec(field(j, "feasibility"), "feasibility");
  if (feas.size() != 4) throw TraceSchemaError("field 'feasibility' must hold 4 numbers");
  r.feasibility = {feas[0], feas[1], feas[2], feas[3]};
  const json& inner = field(j, "inner");
  if (!inner.is_null()) {
    InnerStats s;
    s.iterations = field(inner, "iterations").get<int>();
    s.status = parse_tr_status(field(inner, "status").get<std::string>());
    s.grad_norm = to_num(field(inner, "grad_norm"), "grad_norm");
    s.hess_min_eig = to_num(field(inner, "hess_min_eig"), "hess_min_eig");
    s.descent_ok = field(inner, "descent_ok").get<bool>();
    r.inner = s;
  }
  r.branch = parse_branch(field(j, "branch").get<std::string>());
  r.mu_safeguarded = to_vec(field(j, "mu_safeguarded"), "mu_safeguarded");
  r.omega_safeguarded = to_vec(field(j, "omega_safeguarded"), "omega_safeguarded");
  r.extra = to_num_map(field(j, "extra"), "extra");
  r.flags = field(j, "flags").get<std::vector<std::string>>();
  return r;
}

}  // namespace

void write_trace(std::ostream& out, const SolverTrace& trace) {
  json header;
  header["schema"] = kTraceSchema;
  header["problem"] = trace.problem;
  header["method"] = trace.method;
  header["origin"] = trace.origin;
  header["status"] = to_string(trace.status);
  header["message"] = trace.message;
  header["params"] = num_map(trace.params);
  json vectors = json::object();
  for (const auto& [k, v] : trace.vectors) vectors[k] = vec(v);
  header["vectors"] = vectors;
  out << header.dump() << '\n';
  for (const auto& r : trace.records) out << record_json(r).dump() << '\n';
}

SolverTrace read_trace(std::istream& in) {
  std::string line;
  int lineno = 0;
  SolverTrace trace;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
      if (!have_header) {
        const json& schema = field(j, "schema");
        if (!schema.is_string() || schema.get<std::string>() != kTraceSchema) {
          throw TraceSchemaError("unsupported schema " + schema.dump() + ", expected \"" + kTraceSchema + "\"");
        }
        trace.problem = field(j, "problem").get<std::string>();
        trace.method = field(j, "method").get<std::string>();
        trace.origin = field(j, "origin").get<std::string>();
        trace.status = parse_status(field(j, "status").get<std::string>());
        trace.message = field(j, "message").get<std::string>();
        trace.params = to_num_map(field(j, "params"), "params");
        const json& vectors = field(j, "vectors");
        if (!vectors.is_object()) throw TraceSchemaError("field 'vectors' is not an object");
        for (auto it = vectors.begin(); it != vectors.end(); ++it) {
          trace.vectors[it.key()] = to_vec(it.value(), "vectors");
        }
        have_header = true;
      } else {
        TraceRecord r = parse_record(j);
        if (!trace.records.empty() && r.k <= trace.records.back().k) {
          throw TraceSchemaError("k is not strictly increasing");
        }
        trace.records.push_back(std::move(r));
      }
    } catch (const TraceSchemaError& e) {
      throw TraceSchemaError("line " + std::to_string(lineno) + ": " + e.what());
    } catch (const json::exception& e) {
      throw TraceSchemaError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!have_header) throw TraceSchemaError("empty trace file");
  return trace;
}

void save_trace(const std::string& path, const SolverTrace& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_trace(out, trace);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

SolverTrace load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_trace(in);
}

void validate_trace(const SolverTrace& trace, const NlpProblem& problem) {
  if (trace.problem != problem.name()) {
    throw TraceSchemaError("trace is for problem '" + trace.problem + "', not '" + problem.name() + "'");
  }
  for (const auto& r : trace.records) {
    const std::string at = "record k = " + std::to_string(r.k) + ": ";
    if (r.x.size() != problem.n()) throw TraceSchemaError(at + "x has wrong dimension");
    if (r.mu.size() != problem.p()) throw TraceSchemaError(at + "mu has wrong dimension");
    if (r.omega.size() != problem.m()) throw TraceSchemaError(at + "omega has wrong dimension");
    if (r.mu_safeguarded.size() != 0 && r.mu_safeguarded.size() != problem.p()) {
      throw TraceSchemaError(at + "mu_safeguarded has wrong dimension");
    }
    if (r.omega_safeguarded.size() != 0 && r.omega_safeguarded.size() != problem.m()) {
      throw TraceSchemaError(at + "omega_safeguarded has wrong dimension");
    }
  }
  for (std::size_t i = 1; i < trace.records.size(); ++i) {
    if (trace.records[i].k <= trace.records[i - 1].k) throw TraceSchemaError("k is not strictly increasing");
  }
  auto it = trace.vectors.find("x_star");
  if (it != trace.vectors.end() && it->second.size() != problem.n()) {
    throw TraceSchemaError("header vector x_star has wrong dimension");
  }
}

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string vec17(const Vector& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + g17(v[i]);
  return s + "]";
}

}  // namespace

std::string format_report(const ConditionReport& report) {
  std::ostringstream o;
  const CertifyOptions& opt = report.options;
  const bool sampled = report.condition == Condition::kCSakkt2;
  o << "problem: " << report.problem << '\n';
  o << "condition: " << to_string(report.condition) << '\n';
  o << "verdict: " << to_string(report.verdict) << '\n';
  o << "method: " << (sampled ? "sampled-cone" : "exact-subspace") << '\n';
  o << "seed: " << opt.seed << '\n';
  o << "n_samples: " << opt.n_samples << '\n';
  o << "window: " << opt.window << '\n';
  o << "radius_factor: " << g17(opt.radius_factor) << '\n';
  o << "tol_act: " << g17(opt.tol_act) << '\n';
  o << "tol_mult: " << g17(opt.tol_mult) << '\n';
  o << "tol_rank: " << g17(opt.tol_rank) << '\n';
  o << "eps_slack: " << g17(opt.eps_slack) << '\n';
  o << "x_star: " << vec17(report.x_star) << '\n';
  o << "window_radius: " << g17(report.window_radius) << '\n';
  o << "iterations_checked: " << report.iterations.size() << '\n';
  o << "failing_k: " << (report.failing_k ? std::to_string(*report.failing_k) : "none") << '\n';
  o << "reason: " << (report.reason.empty() ? "none" : report.reason) << '\n';
  o << "witness: " << (report.witness ? vec17(*report.witness) : "none") << '\n';
  for (const auto& it : report.iterations) {
    o << "- k: " << it.k << '\n';
    o << "  eps: " << g17(it.eps) << '\n';
    o << "  residuals: " << vec17((Vector(4) << it.residuals.grad, it.residuals.eq, it.residuals.ineq,
                                   it.residuals.comp).finished())
      << '\n';
    o << "  first_order: " << (it.first_order_passed ? "pass" : "fail") << '\n';
    if (it.space) {
      o << "  space: " << to_string(it.space->kind) << '\n';
      o << "  space_eq_rows: " << it.space->eq_rows.rows() << '\n';
      o << "  space_le_rows: " << it.space->le_rows.rows() << '\n';
    }
    if (it.second_order) {
      const SecondOrderCertificate& c = *it.second_order;
      o << "  certificate: " << to_string(c.method) << '\n';
      o << "  lambda_min: " << g17(c.lambda_min) << '\n';
      o << "  basis_dim: " << c.basis_dim << '\n';
      if (c.method == CertificateMethod::kSampledCone) {
        o << "  samples_in_cone: " << c.samples_in_cone << '\n';
        o << "  sample_seed: " << c.seed << '\n';
      }
      o << "  witness: " << (c.witness ? vec17(*c.witness) : "none") << '\n';
    }
    o << "  passed: " << (it.passed ? "true" : "false") << '\n';
  }
  return o.str();
}

}  // namespace sakkt
