// Batch front-end: solve, residual, check, scan-multiplicity, scan-infinite,
// sample-timescale and print-config on a run configuration file.
//
// Exit codes: 0 success, 1 solver did not converge, 2 configuration or input
// error, 3 a condition check failed (--strict only).

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "tscale/tscale.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNoConvergence = 1;
constexpr int kExitConfig = 2;
constexpr int kExitCheckFailed = 3;

using tscale::detail::format_real;

struct Options {
  std::string config;
  std::string output;
  std::string report;
  bool strict = false;
};

class InputError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Write to a sibling temporary, then rename over the destination.
void write_atomically(const std::string& path, const std::string& content) {
  const std::filesystem::path dest(path);
  std::filesystem::path tmp = dest;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out.flush()) throw InputError("failed writing '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, dest);
}

// CSV goes to --output, or stdout; the report goes to --report, or stdout
// when the CSV went to a file, or stderr otherwise.
void emit(const Options& opt, const std::string& csv, const std::string& report) {
  if (!csv.empty()) {
    if (opt.output.empty())
      std::cout << csv;
    else
      write_atomically(opt.output, csv);
  }
  if (!opt.report.empty())
    write_atomically(opt.report, report);
  else if (opt.output.empty() && !csv.empty())
    std::cerr << report;
  else
    std::cout << report;
}

std::string check_line(const tscale::CheckReport& r, const char* name) {
  const bool upper = r.id == "(i)";
  std::string s = r.id + " " + name + " = " + format_real(r.level) + ": " +
                  (upper ? "max f = " : "min f = ") + format_real(r.lhs) +
                  (upper ? " <= phi_p(a*A) = " : " >= phi_p(b*B) = ") + format_real(r.rhs) + "  " +
                  (r.passed ? "PASS" : "FAIL") + " (samples " + std::to_string(r.samples) +
                  ", extremum at u = " + format_real(r.extremum_at) + ")";
  if (!r.diagnostic.empty()) s += " [" + r.diagnostic + "]";
  return s + "\n";
}

std::string solve_report(const tscale::SolveReport& rep, const std::optional<tscale::Residual>& res) {
  std::string s;
  s += std::string("status: ") + tscale::to_string(rep.status) + "\n";
  if (!rep.message.empty()) s += "message: " + rep.message + "\n";
  s += "iterations: " + std::to_string(rep.iterations) + "\n";
  s += "final_step_norm: " + format_real(rep.final_step_norm) + "\n";
  s += "norm: " + format_real(rep.norm) + "\n";
  s += "residual_interior_max: " + format_real(rep.residual_interior_max) + "\n";
  s += "residual_boundary_slope_at_T: " + format_real(rep.residual_boundary.first) + "\n";
  s += "residual_boundary_initial: " + format_real(rep.residual_boundary.second) + "\n";
  if (res) {
    s += "alt_slope_at_0: " + format_real(res->slope_at_zero) + "\n";
    s += "alt_end_gap: " + format_real(res->end_gap) + "\n";
  }
  s += std::string("in_cone: ") + (rep.in_cone ? "true" : "false") + "\n";
  for (const auto& w : rep.warnings) s += "warning: " + w + "\n";
  return s;
}

int run_solve(const tscale::RunConfig& cfg, const Options& opt, bool residual_only) {
  const tscale::BoundaryValueProblem problem(cfg.problem());
  const auto rep = tscale::picard_solve(problem, cfg.solver());
  std::optional<tscale::Residual> res;
  if (std::isfinite(rep.residual_interior_max)) res = tscale::residual(problem, rep.solution);
  const auto slope = tscale::delta_derivative(rep.solution);
  const auto& grid = problem.grid();

  std::string csv = residual_only ? "t,u,residual_interior\n" : "t,u,u_delta,residual_interior\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    csv += format_real(grid[i]) + "," + format_real(rep.solution[i]) + ",";
    if (!residual_only) csv += format_real(slope[i]) + ",";
    if (res && !res->interior.is_extended(i)) csv += format_real(res->interior[i]);
    csv += "\n";
  }
  emit(opt, csv, solve_report(rep, res));
  return rep.converged ? kExitOk : kExitNoConvergence;
}

int run_check(const tscale::RunConfig& cfg, const Options& opt) {
  if (!cfg.a || !cfg.b) throw InputError("check needs keys 'a' and 'b' in [check]");
  const auto ctx = tscale::ConditionContext::from(cfg.problem(), cfg.samples);
  const auto [up, lo] = tscale::check_existence_pair(ctx, *cfg.a, *cfg.b, cfg.samples);
  std::string s = "alpha = " + format_real(ctx.alpha()) + ", A(a) = " + format_real(ctx.A(*cfg.a)) +
                  ", B = " + format_real(ctx.B()) + ", h_sup = " + format_real(ctx.h_sup) + "\n";
  s += check_line(up, "a");
  s += check_line(lo, "b");
  s += std::string(up.passed ? "PASS" : "FAIL") + " " + (lo.passed ? "PASS" : "FAIL") + "\n";
  if (up.passed && lo.passed)
    s += "predicted shell: " + format_real(*cfg.b) + " < |u| < " + format_real(*cfg.a) + "\n";
  emit(opt, "", s);
  return (opt.strict && !(up.passed && lo.passed)) ? kExitCheckFailed : kExitOk;
}

int run_scan_multiplicity(const tscale::RunConfig& cfg, const Options& opt) {
  if (!cfg.levels) throw InputError("scan-multiplicity needs key 'levels' in [check]");
  const auto ctx = tscale::ConditionContext::from(cfg.problem(), cfg.samples);
  const auto rep = tscale::scan_multiplicity(ctx, *cfg.levels, cfg.samples);
  std::string csv = "level,condition,lhs,rhs,passed\n";
  std::string s;
  for (const auto& c : rep.checks) {
    csv += format_real(c.level) + "," + c.id + "," + format_real(c.lhs) + "," + format_real(c.rhs) +
           "," + (c.passed ? "1" : "0") + "\n";
    s += check_line(c, "level");
  }
  s += std::string("all conditions: ") + (rep.all_passed ? "PASS" : "FAIL") + "\n";
  for (const auto& [lo, hi] : rep.shells)
    s += "predicted shell: " + format_real(lo) + " < |u| < " + format_real(hi) + "\n";
  emit(opt, opt.output.empty() ? "" : csv, s);
  return (opt.strict && !rep.all_passed) ? kExitCheckFailed : kExitOk;
}

int run_scan_infinite(const tscale::RunConfig& cfg, const Options& opt) {
  if (!cfg.a0 || !cfg.ratio || !cfg.k_max)
    throw InputError("scan-infinite needs keys 'a0', 'ratio' and 'k_max' in [check]");
  const auto ctx = tscale::ConditionContext::from(cfg.problem(), cfg.samples);
  const auto rep = tscale::scan_infinite(ctx, *cfg.a0, *cfg.ratio, *cfg.k_max, cfg.samples);
  std::string csv = "k,a,b,upper_lhs,upper_rhs,upper_pass,lower_lhs,lower_rhs,lower_pass,pair_pass\n";
  std::string s;
  for (const auto& p : rep.pairs) {
    csv += std::to_string(p.k) + "," + format_real(p.a) + "," + format_real(p.b) + "," +
           format_real(p.upper.lhs) + "," + format_real(p.upper.rhs) + "," +
           (p.upper.passed ? "1" : "0") + "," + format_real(p.lower.lhs) + "," +
           format_real(p.lower.rhs) + "," + (p.lower.passed ? "1" : "0") + "," +
           (p.passed ? "1" : "0") + "\n";
    s += "k = " + std::to_string(p.k) + ": " + (p.passed ? "PASS" : "FAIL") + "\n";
    s += "  " + check_line(p.upper, "a");
    s += "  " + check_line(p.lower, "b");
  }
  s += "longest passing run: " + std::to_string(rep.run_length);
  if (rep.run_length) s += " (k = " + std::to_string(rep.run_start) + ".." +
                           std::to_string(rep.run_start + rep.run_length - 1) + ")";
  s += "\n";
  emit(opt, opt.output.empty() ? "" : csv, s);
  return (opt.strict && rep.run_length == 0) ? kExitCheckFailed : kExitOk;
}

int run_sample(const tscale::RunConfig& cfg, const Options& opt) {
  const tscale::BoundaryValueProblem problem(cfg.problem());
  const auto& g = problem.grid();
  std::string csv = "index,t,right_dense,left_dense,sigma,rho\n";
  for (std::size_t i = 0; i < g.size(); ++i)
    csv += std::to_string(i) + "," + format_real(g[i]) + "," + (g.right_dense(i) ? "1" : "0") + "," +
           (g.left_dense(i) ? "1" : "0") + "," + format_real(tscale::sigma(g, i)) + "," +
           format_real(tscale::rho(g, i)) + "\n";
  const std::string s = "points: " + std::to_string(g.size()) + "\neta index: " +
                        std::to_string(problem.eta_index()) + "\n";
  emit(opt, csv, s);
  return kExitOk;
}

int run_print(const tscale::RunConfig& cfg, const Options& opt) {
  const auto text = tscale::print_config(cfg);
  if (opt.output.empty())
    std::cout << text;
  else
    write_atomically(opt.output, text);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-scale p-Laplacian boundary value problem solver"};
  app.require_subcommand(1);
  app.footer(std::string("Exit codes: 0 success, 1 no convergence, 2 config error, 3 failed check "
                         "(--strict)\n\nExpression grammar for the f and h keys:\n") +
             tscale::kExpressionGrammar);

  Options opt;
  const char* names[] = {"solve", "residual", "check", "scan-multiplicity", "scan-infinite",
                         "sample-timescale", "print-config"};
  const char* help[] = {"Solve by damped Picard iteration; CSV t,u,u_delta,residual_interior",
                        "Solve and report residuals; CSV t,u,residual_interior",
                        "Check the existence conditions at levels a and b",
                        "Check alternating conditions at the given levels",
                        "Check geometric level pairs a_k > b_k tending to zero",
                        "Write the sampled grid with density flags and jumps",
                        "Print the canonical form of the configuration"};
  for (std::size_t i = 0; i < std::size(names); ++i) {
    auto* sub = app.add_subcommand(names[i], help[i]);
    sub->add_option("--config", opt.config, "Run configuration file")->required();
    sub->add_option("--output", opt.output, "CSV output path (default stdout)");
    sub->add_option("--report", opt.report, "Text report path");
    sub->add_flag("--strict", opt.strict, "Exit 3 when a condition check fails");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    const auto cfg = tscale::parse_config(read_file(opt.config));
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "solve") return run_solve(cfg, opt, false);
    if (cmd == "residual") return run_solve(cfg, opt, true);
    if (cmd == "check") return run_check(cfg, opt);
    if (cmd == "scan-multiplicity") return run_scan_multiplicity(cfg, opt);
    if (cmd == "scan-infinite") return run_scan_infinite(cfg, opt);
    if (cmd == "sample-timescale") return run_sample(cfg, opt);
    return run_print(cfg, opt);
  } catch (const tscale::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
  } catch (const tscale::ExprEvalError& e) {
    std::cerr << "evaluation error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return kExitConfig;
}
