#include "sakkt/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "sakkt/auglag.hpp"
#include "sakkt/optimality.hpp"
#include "sakkt/oracle.hpp"
#include "sakkt/penalty.hpp"
#include "sakkt/problemlib.hpp"
#include "sakkt/trace_io.hpp"

namespace sakkt {

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ContractViolation("not a number: '" + item + "'");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos) {
      throw ContractViolation("not a number: '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw ContractViolation("empty number list");
  return out;
}

namespace {

Vector to_vector(const std::string& text, int n, const char* what) {
  const std::vector<double> v = parse_number_list(text);
  if (static_cast<int>(v.size()) != n) {
    throw ContractViolation(std::string(what) + " needs " + std::to_string(n) + " components, got " +
                            std::to_string(v.size()));
  }
  return Eigen::Map<const Vector>(v.data(), n);
}

std::string g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string join(const Vector& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? "," : "") + g(v[i]);
  return s;
}

/// config lines become --key=value tokens placed ahead of the real flags,
/// so explicit flags win.
std::vector<std::string> expand_config(const std::vector<std::string>& args, const std::set<std::string>& subs) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw CLI::FileError::Missing(path);
  std::vector<std::string> tokens;
  for (const CLI::ConfigItem& item : CLI::ConfigINI().from_config(in)) {
    if (item.name == "++" || item.name == "--") continue;
    std::string value;
    for (std::size_t i = 0; i < item.inputs.size(); ++i) value += (i ? "," : "") + item.inputs[i];
    tokens.push_back("--" + item.name + "=" + value);
  }
  std::vector<std::string> out = args;
  auto it = std::find_if(out.begin(), out.end(), [&](const std::string& a) { return subs.count(a) > 0; });
  if (it == out.end()) return args;
  out.insert(it + 1, tokens.begin(), tokens.end());
  return out;
}

struct SolveFlags {
  std::string problem;
  std::string method;
  std::string out;
  std::string x0;
  double rho0 = 10.0;
  double gamma = 10.0;
  double eps0 = 1e-2;
  std::optional<double> theta;
  std::optional<int> max_outer;
  double stop_tol = 1e-8;
  double tol_act = 1e-6;
  double tau = 0.5;
  double mu_min = -1e6;
  double mu_max = 1e6;
  double omega_max = 1e6;
  int inner_max_iter = 10000;
};

struct VerifyFlags {
  std::string trace;
  std::string problem;
  std::string condition;
  std::string x_star = "auto";
  std::string report;
  CertifyOptions opt;
};

struct OracleFlags {
  std::string problem;
  std::string x_bar;
  std::string out;
  OracleConfig cfg;
};

struct ListFlags {
  std::string filter;
  bool names_only = false;
};

struct ReferenceFlags {
  std::string problem;
  int k_first = 3;
  int k_last = 50;
  std::string out;
};

double final_lambda(const NlpProblem& problem, const TraceRecord& r, double tol_act) {
  const CriticalSpaceSpec space = build_space(problem, SpaceKind::kSTilde, r.x, r.x, r.omega, tol_act, 0.0);
  return second_order_subspace(lagrangian_hessian(problem, {r.x, r.mu, r.omega}),
                               nullspace_basis(space.eq_rows, problem.n(), 1e-10), r.eps)
      .lambda_min;
}

int cmd_solve(const SolveFlags& f, std::ostream& out, std::ostream& err) {
  const ProblemEntry& entry = get(f.problem);
  const NlpProblem& problem = entry.problem;
  const Vector x0 = f.x0.empty() ? entry.default_start : to_vector(f.x0, problem.n(), "--x0");

  SolverTrace trace;
  if (f.method == "auglag") {
    AugLagParams p;
    p.rho_1 = f.rho0;
    p.gamma = f.gamma;
    p.eps = {f.eps0, f.theta.value_or(p.eps.factor)};
    p.tau = f.tau;
    p.mu_min = f.mu_min;
    p.mu_max = f.mu_max;
    p.omega_max = f.omega_max;
    p.x0 = x0;
    if (f.max_outer) p.max_outer = *f.max_outer;
    p.stop_tol = f.stop_tol;
    p.tol_act = f.tol_act;
    p.inner.max_iterations = f.inner_max_iter;
    trace = run_auglag(problem, p);
  } else {
    PenaltyParams p;
    p.rho = {f.rho0, f.gamma};
    p.eps = {f.eps0, f.theta.value_or(p.eps.factor)};
    p.x0 = x0;
    if (f.max_outer) p.max_outer = *f.max_outer;
    p.stop_tol = f.stop_tol;
    p.tol_act = f.tol_act;
    p.inner.max_iterations = f.inner_max_iter;
    trace = f.method == "penalty" ? run_basic(problem, p) : run_modified(problem, p);
  }
  if (!f.out.empty()) save_trace(f.out, trace);

  out << "problem=" << problem.name() << " method=" << f.method << " status=" << to_string(trace.status);
  if (!trace.records.empty()) {
    const TraceRecord& r = trace.records.back();
    out << " k=" << r.k << " rho=" << g(r.rho) << " x=" << join(r.x) << " grad=" << g(r.residuals.grad)
        << " eq=" << g(r.residuals.eq) << " ineq=" << g(r.residuals.ineq) << " comp=" << g(r.residuals.comp)
        << " lambda_min=" << g(final_lambda(problem, r, f.tol_act));
    if (r.mu.size() > 0) out << " mu=" << join(r.mu);
    if (r.omega.size() > 0) out << " omega=" << join(r.omega);
  }
  out << '\n';
  if (!trace.message.empty()) err << trace.message << '\n';

  switch (trace.status) {
    case TraceStatus::kConverged: return exit_code::kOk;
    case TraceStatus::kMaxOuter: return exit_code::kMaxOuter;
    case TraceStatus::kFailed: return exit_code::kFailure;
  }
  return exit_code::kFailure;
}

int cmd_verify(const VerifyFlags& f, std::ostream& out, std::ostream& err) {
  SolverTrace trace;
  try {
    trace = load_trace(f.trace);
    const std::string name = f.problem.empty() ? trace.problem : f.problem;
    validate_trace(trace, get(name).problem);
  } catch (const TraceSchemaError& e) {
    err << "schema mismatch: " << e.what() << '\n';
    return exit_code::kUsage;
  }
  const NlpProblem& problem = get(trace.problem).problem;
  const Condition condition = *parse_condition(f.condition);

  Vector x_star;
  if (f.x_star == "auto") {
    auto it = trace.vectors.find("x_star");
    if (it != trace.vectors.end()) {
      x_star = it->second;
    } else if (!trace.records.empty()) {
      x_star = trace.records.back().x;
    } else {
      err << "trace has no records; cannot pick x_star\n";
      return exit_code::kInconclusive;
    }
  } else {
    x_star = to_vector(f.x_star, problem.n(), "--x-star");
  }

  const ConditionReport report = certify_trace(problem, trace, x_star, condition, f.opt);
  const std::string text = format_report(report);
  if (f.report.empty()) {
    out << text;
  } else {
    std::ofstream rep(f.report);
    if (!rep) throw std::runtime_error("cannot open '" + f.report + "' for writing");
    rep << text;
    out << "verdict=" << to_string(report.verdict) << " condition=" << to_string(condition) << '\n';
  }
  switch (report.verdict) {
    case Verdict::kPass: return exit_code::kOk;
    case Verdict::kFail: return exit_code::kVerifyFail;
    case Verdict::kInconclusive: return exit_code::kInconclusive;
  }
  return exit_code::kInconclusive;
}

int cmd_oracle(OracleFlags f, std::ostream& out, std::ostream& err) {
  const ProblemEntry& entry = get(f.problem);
  const NlpProblem& problem = entry.problem;
  f.cfg.x_bar = f.x_bar.empty() ? entry.reference_point : to_vector(f.x_bar, problem.n(), "--x-bar");
  try {
    f.cfg.validate(problem);
  } catch (const std::invalid_argument& e) {
    err << e.what() << '\n';
    return exit_code::kUsage;
  }
  const SolverTrace trace = necessity_sequence(problem, f.cfg);
  if (!f.out.empty()) save_trace(f.out, trace);
  out << "problem=" << problem.name() << " method=oracle status=" << to_string(trace.status)
      << " records=" << trace.records.size();
  if (!trace.records.empty()) {
    const TraceRecord& r = trace.records.back();
    out << " rho=" << g(r.rho) << " x=" << join(r.x) << " eps=" << g(r.eps)
        << " identity_gap=" << g(r.extra.at("identity_gap"));
  }
  out << '\n';
  if (!trace.message.empty()) err << trace.message << '\n';
  return trace.status == TraceStatus::kFailed ? exit_code::kFailure : exit_code::kOk;
}

int cmd_list(const ListFlags& f, std::ostream& out) {
  for (const std::string& name : list()) {
    const ProblemEntry& e = get(name);
    if (!f.filter.empty() && name.find(f.filter) == std::string::npos &&
        e.description.find(f.filter) == std::string::npos) {
      continue;
    }
    if (f.names_only) {
      out << name << '\n';
    } else {
      out << name << "  n=" << e.problem.n() << " p=" << e.problem.p() << " m=" << e.problem.m() << "  "
          << e.description << '\n';
    }
  }
  return exit_code::kOk;
}

int cmd_reference(const ReferenceFlags& f, std::ostream& out, std::ostream& err) {
  const ProblemEntry& entry = get(f.problem);
  if (!entry.reference_trace) {
    err << "problem '" << f.problem << "' has no reference trace\n";
    return exit_code::kUsage;
  }
  const SolverTrace trace = entry.reference_trace(f.k_first, f.k_last);
  if (f.out.empty()) {
    write_trace(out, trace);
  } else {
    save_trace(f.out, trace);
  }
  return exit_code::kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sequential optimality certification for nonlinear programs", "sakkt"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string config;
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config, "key=value file overriding the defaults; explicit flags win");
  };

  SolveFlags sf;
  CLI::App* solve = app.add_subcommand("solve", "Run a penalty or augmented Lagrangian method");
  solve->add_option("--problem", sf.problem, "Library problem")->required();
  solve->add_option("--method", sf.method, "Outer method")
      ->required()
      ->check(CLI::IsMember({"penalty", "penalty-warm", "auglag"}));
  solve->add_option("--out", sf.out, "Trace file to write");
  solve->add_option("--x0", sf.x0, "Start point, comma separated (default: the entry's feasible start)");
  solve->add_option("--rho0", sf.rho0, "Initial penalty parameter")->capture_default_str();
  solve->add_option("--gamma", sf.gamma, "Penalty growth factor")->capture_default_str();
  solve->add_option("--eps0", sf.eps0, "Initial inner tolerance")->capture_default_str();
  solve->add_option("--theta", sf.theta, "Inner tolerance decay (default 0.5 penalty, 0.1 auglag)");
  solve->add_option("--max-outer", sf.max_outer, "Outer iteration cap");
  solve->add_option("--stop-tol", sf.stop_tol, "Outer stopping tolerance")->capture_default_str();
  solve->add_option("--tol-act", sf.tol_act, "Active-set tolerance")->capture_default_str();
  solve->add_option("--tau", sf.tau, "Progress factor (auglag)")->capture_default_str();
  solve->add_option("--mu-min", sf.mu_min, "Equality multiplier safeguard (auglag)")->capture_default_str();
  solve->add_option("--mu-max", sf.mu_max, "Equality multiplier safeguard (auglag)")->capture_default_str();
  solve->add_option("--omega-max", sf.omega_max, "Inequality multiplier cap (auglag)")->capture_default_str();
  solve->add_option("--inner-max-iter", sf.inner_max_iter, "Trust-region iteration cap")->capture_default_str();
  add_config(solve);

  VerifyFlags vf;
  CLI::App* verify = app.add_subcommand("verify", "Certify a sequential optimality condition on a trace");
  verify->add_option("--trace", vf.trace, "Trace file")->required();
  verify->add_option("--problem", vf.problem, "Library problem (default: the trace's)");
  verify->add_option("--condition", vf.condition, "Condition")
      ->required()
      ->check(CLI::IsMember({"akkt", "akkt2", "csakkt2", "ssakkt2"}));
  verify->add_option("--x-star", vf.x_star, "Limit point, comma separated, or auto")->capture_default_str();
  verify->add_option("--report", vf.report, "Report file (default: stdout)");
  verify->add_option("--window", vf.opt.window, "Records checked at the tail")->capture_default_str();
  verify->add_option("--radius-factor", vf.opt.radius_factor, "Window radius factor")->capture_default_str();
  verify->add_option("--tol-act", vf.opt.tol_act, "Active-set tolerance")->capture_default_str();
  verify->add_option("--tol-mult", vf.opt.tol_mult, "Positive-multiplier threshold")->capture_default_str();
  verify->add_option("--tol-rank", vf.opt.tol_rank, "Null-space rank tolerance")->capture_default_str();
  verify->add_option("--samples", vf.opt.n_samples, "Cone samples")->capture_default_str();
  verify->add_option("--seed", vf.opt.seed, "Cone sampling seed")->capture_default_str();
  verify->add_option("--eps-slack", vf.opt.eps_slack, "Allowed eps growth per step")->capture_default_str();
  add_config(verify);

  OracleFlags of;
  CLI::App* oracle = app.add_subcommand("oracle", "Build the regularized-penalty necessity sequence");
  oracle->add_option("--problem", of.problem, "Library problem")->required();
  oracle->add_option("--x-bar", of.x_bar, "Centre point (default: the entry's reference point)");
  oracle->add_option("--delta", of.cfg.delta, "Ball radius in (0, 1/3)")->capture_default_str();
  oracle->add_option("--k-max", of.cfg.k_max, "Number of records")->capture_default_str();
  oracle->add_option("--rho0", of.cfg.rho.initial, "Initial penalty parameter")->capture_default_str();
  oracle->add_option("--gamma", of.cfg.rho.factor, "Penalty growth factor")->capture_default_str();
  oracle->add_option("--grid", of.cfg.grid_per_dim, "Grid seeds per dimension")->capture_default_str();
  oracle->add_option("--starts", of.cfg.random_starts, "Random seeds")->capture_default_str();
  oracle->add_option("--seed", of.cfg.seed, "Random seed")->capture_default_str();
  oracle->add_option("--inner-tol", of.cfg.inner_tol, "Local solve tolerance")->capture_default_str();
  oracle->add_option("--jobs", of.cfg.jobs, "Multistart threads")->capture_default_str();
  oracle->add_option("--out", of.out, "Trace file to write");
  add_config(oracle);

  ListFlags lf;
  CLI::App* lst = app.add_subcommand("list", "List library problems");
  lst->add_option("--filter", lf.filter, "Substring of name or description");
  lst->add_flag("--names-only", lf.names_only, "Print names only");
  add_config(lst);

  ReferenceFlags rf;
  CLI::App* ref = app.add_subcommand("reference", "Write a problem's reference trace");
  ref->add_option("--problem", rf.problem, "Library problem")->required();
  ref->add_option("--k-first", rf.k_first, "First index")->capture_default_str();
  ref->add_option("--k-last", rf.k_last, "Last index")->capture_default_str();
  ref->add_option("--out", rf.out, "Trace file (default: stdout)");
  add_config(ref);

  try {
    std::vector<std::string> argv = expand_config(args, {"solve", "verify", "oracle", "list", "reference"});
    std::reverse(argv.begin(), argv.end());
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_code::kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_code::kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    CLI::App* used = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << used->help();
    return exit_code::kUsage;
  }

  try {
    if (solve->parsed()) return cmd_solve(sf, out, err);
    if (verify->parsed()) return cmd_verify(vf, out, err);
    if (oracle->parsed()) return cmd_oracle(of, out, err);
    if (lst->parsed()) return cmd_list(lf, out);
    if (ref->parsed()) return cmd_reference(rf, out, err);
  } catch (const NotFoundError& e) {
    err << e.what() << '\n';
    return exit_code::kUsage;
  } catch (const std::invalid_argument& e) {
    err << e.what() << '\n';
    return exit_code::kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kFailure;
  }
  return exit_code::kUsage;
}

}  // namespace sakkt
