#pragma once

/**
 * @file solver.hpp
 * @brief Fixed-point formulation of the quasilinear p-Laplacian problem
 *
 *   -(φ_p(u^Δ(t)))^∇ = f(u(t)) + h(t)   on a time scale 𝕋 ⊂ [0, T],
 *
 * through the integral operator
 *
 *   F u(t) = φ_q(∫_η^T g ∇r) + ∫_0^t φ_q(∫_s^T g ∇r) Δs,   g = f(u) + h.
 *
 * Fixed points of F satisfy u^Δ(T) = 0 and u(0) = φ_q(∫_η^T g ∇r); the
 * residual reports both of these alongside the interior equation.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <future>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tscale/expr.hpp"
#include "tscale/phi.hpp"
#include "tscale/timescale.hpp"

namespace tscale {

/// Problem data as supplied by the user.
struct ProblemSpec {
  PExponent exponent{2.0};
  double horizon = 1.0;
  double eta = 0.5;
  Expr f;
  Expr h;
  TimeScaleSpec timescale = TimeScaleSpec::interval(1.0);
  double resolution = 1e-3;
};

/**
 * Validated problem bound to its sampled grid.
 *
 * h is tabulated once on the grid; f is evaluated at max(u, 0) so that
 * round-off dips below zero never reach the user's expression.
 */
class BoundaryValueProblem {
 public:
  explicit BoundaryValueProblem(ProblemSpec spec) : spec_(std::move(spec)) {
    const double T = spec_.horizon;
    if (!(T > 0.0)) throw std::invalid_argument("horizon T must be positive");
    if (spec_.timescale.horizon() != T)
      throw std::invalid_argument("horizon T = " + detail::format_real(T) +
                                  " does not match the time scale maximum " +
                                  detail::format_real(spec_.timescale.horizon()));
    if (!(spec_.eta > 0.0 && spec_.eta < T))
      throw std::invalid_argument("eta must satisfy 0 < eta < T");
    if (!spec_.timescale.contains(spec_.eta))
      throw std::invalid_argument("eta = " + detail::format_real(spec_.eta) +
                                  " is not a point of the time scale");
    if (spec_.f.uses(Variable::t)) throw std::invalid_argument("f may depend on u only");
    if (spec_.h.uses(Variable::u)) throw std::invalid_argument("h may depend on t only");

    const double required[] = {spec_.eta};
    grid_ = make_grid(spec_.timescale, spec_.resolution, required);
    eta_index_ = *grid_->index_of(spec_.eta);
    h_values_.resize(grid_->size());
    for (std::size_t i = 0; i < grid_->size(); ++i)
      h_values_[i] = spec_.h.eval(std::nullopt, (*grid_)[i]);
  }

  const ProblemSpec& spec() const noexcept { return spec_; }
  const PExponent& exponent() const noexcept { return spec_.exponent; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  const SampledTimeScale& grid() const noexcept { return *grid_; }
  std::size_t eta_index() const noexcept { return eta_index_; }
  double h_at(std::size_t i) const { return h_values_[i]; }

  double f_at(double u) const { return spec_.f.eval(std::max(u, 0.0), std::nullopt); }

  /// g_i = f(u_i) + h(t_i) on every grid point.
  std::vector<double> forcing(std::span<const double> u) const {
    if (u.size() != grid_->size()) throw std::invalid_argument("grid function is on another grid");
    std::vector<double> g(u.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = f_at(u[i]) + h_values_[i];
    return g;
  }

 private:
  ProblemSpec spec_;
  GridPtr grid_;
  std::size_t eta_index_ = 0;
  std::vector<double> h_values_;
};

struct SolverConfig {
  double tolerance = 1e-10;
  std::size_t max_iterations = 1000;
  double damping = 1.0;
  std::variant<double, GridFunction> initial_guess = 0.0;

  void validate() const {
    if (!(tolerance > 0.0)) throw std::invalid_argument("solver tolerance must be positive");
    if (!(damping > 0.0 && damping <= 1.0))
      throw std::invalid_argument("damping must lie in (0, 1]");
  }
};

enum class SolveStatus { converged, max_iterations, non_finite };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged:
      return "converged";
    case SolveStatus::max_iterations:
      return "max_iterations";
    case SolveStatus::non_finite:
      return "non_finite";
  }
  return "?";
}

struct Residual {
  /// Interior residual; entries at `interior.extended()` are placeholders (0).
  GridFunction interior;
  double interior_max = 0.0;
  /// u^Δ(T), continued through the equation at T.
  double boundary_slope = 0.0;
  /// u(0) - φ_q(∫_η^T g ∇r).
  double boundary_initial = 0.0;
  /// The alternative pair u^Δ(0) and u(T) - u(η), reported for comparison only.
  double slope_at_zero = 0.0;
  double end_gap = 0.0;
};

struct SolveReport {
  GridFunction solution;
  bool converged = false;
  SolveStatus status = SolveStatus::max_iterations;
  std::size_t iterations = 0;
  double final_step_norm = 0.0;
  std::vector<double> step_trace;
  double residual_interior_max = 0.0;
  std::pair<double, double> residual_boundary{0.0, 0.0};
  double norm = 0.0;
  bool in_cone = false;
  std::vector<std::string> warnings;
  std::string message;
};

namespace detail {

// Backward cumulative ∇-sums: out[i] = Σ_{j>i} g_j (t_j - t_{j-1}).
inline std::vector<double> tail_nabla_sums(const SampledTimeScale& grid,
                                           std::span<const double> g) {
  const std::size_t n = grid.last();
  std::vector<double> tail(grid.size(), 0.0);
  for (std::size_t i = n; i-- > 0;) tail[i] = tail[i + 1] + g[i + 1] * (grid[i + 1] - grid[i]);
  return tail;
}

inline std::vector<double> apply_operator(const BoundaryValueProblem& problem,
                                          std::span<const double> u) {
  const auto& grid = problem.grid();
  const auto g = problem.forcing(u);
  const auto tail = tail_nabla_sums(grid, g);
  const auto& e = problem.exponent();

  std::vector<double> out(grid.size());
  double acc = phi_inverse(e, tail[problem.eta_index()]);
  out[0] = acc;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    acc += phi_inverse(e, tail[i - 1]) * (grid[i] - grid[i - 1]);
    out[i] = acc;
  }
  return out;
}

inline bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace detail

/// ∫_s^T (f(u(r)) + h(r)) ∇r for grid index s.
inline double inner_integral(const BoundaryValueProblem& problem, const GridFunction& u,
                             std::size_t s) {
  if (s >= u.size()) throw std::out_of_range("inner_integral: point index out of range");
  return detail::tail_nabla_sums(problem.grid(), problem.forcing(u.values()))[s];
}

inline double inner_integral(const BoundaryValueProblem& problem, const GridFunction& u,
                             double s) {
  const auto idx = u.grid().index_of(s);
  if (!idx) throw std::invalid_argument("inner_integral: s is not a grid point");
  return inner_integral(problem, u, *idx);
}

/// The fixed-point operator F, O(N) via one backward cumulative sum.
inline GridFunction apply_F(const BoundaryValueProblem& problem, const GridFunction& u) {
  return GridFunction(problem.grid_ptr(), detail::apply_operator(problem, u.values()));
}

inline Residual residual(const BoundaryValueProblem& problem, const GridFunction& u) {
  const auto& grid = problem.grid();
  const auto& e = problem.exponent();
  const std::size_t n = grid.last();
  if (n < 1) throw std::invalid_argument("residual needs at least two grid points");

  const auto g = problem.forcing(u.values());
  const auto slope = delta_derivative(u);
  std::vector<double> flux(grid.size());
  for (std::size_t i = 0; i < n; ++i) flux[i] = phi(e, slope[i]);

  std::vector<double> r(grid.size(), 0.0);
  double rmax = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double div = (flux[i] - flux[i - 1]) / (grid[i] - grid[i - 1]);
    r[i] = -div - g[i];
    rmax = std::max(rmax, std::abs(r[i]));
  }

  Residual out{GridFunction(u.grid_ptr(), std::move(r), {0, n}), rmax};
  // Flux at T implied by the equation holding at T, mapped back through φ_q.
  out.boundary_slope = phi_inverse(e, flux[n - 1] - g[n] * (grid[n] - grid[n - 1]));

  const auto tail = detail::tail_nabla_sums(grid, g);
  out.boundary_initial = u[0] - phi_inverse(e, tail[problem.eta_index()]);
  out.slope_at_zero = slope[0];
  out.end_gap = u[n] - u[problem.eta_index()];
  return out;
}

/**
 * Cone membership: u >= -1e-12 everywhere and u^Δ nonincreasing within
 * 1e-9 (1 + ‖u^Δ‖).
 */
inline bool in_cone(const GridFunction& u) {
  if (u.size() < 3) throw std::invalid_argument("in_cone needs at least three grid points");
  for (double v : u.values())
    if (v < -1e-12) return false;
  const auto d = delta_derivative(u);
  const double slack = 1e-9 * (1.0 + sup_norm(d));
  const std::size_t n = u.grid().last();
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (d[i + 1] > d[i] + slack) return false;
  return true;
}

namespace detail {

inline void positivity_warnings(const BoundaryValueProblem& problem, double norm,
                                std::vector<std::string>& warnings) {
  const auto& spec = problem.spec();
  const double u_hi = std::max(norm, 1e-12);
  const auto pf = check_positivity(spec.f, Variable::u, 0.0, u_hi, 1001);
  if (!pf.positive)
    warnings.push_back("f is not positive on [0, " + format_real(u_hi) + "] (min " +
                       format_real(pf.min_value) + " at u = " + format_real(pf.argmin) +
                       "); cone and shell guarantees do not apply");
  const auto ph = check_positivity(spec.h, Variable::t, 0.0, spec.horizon, 1001);
  if (!ph.positive)
    warnings.push_back("h is not positive on [0, T] (min " + format_real(ph.min_value) +
                       " at t = " + format_real(ph.argmin) + ")");
}

}  // namespace detail

/**
 * Damped Picard iteration u <- (1 - λ) u + λ F(u).
 *
 * `iterations` counts updates applied to the initial guess; the returned
 * iterate u_k is the first whose next step satisfies λ‖F(u_k) - u_k‖ <= tol.
 * Non-finite iterates stop the loop with status non_finite.
 */
inline SolveReport picard_solve(const BoundaryValueProblem& problem, const SolverConfig& config) {
  config.validate();
  const auto& grid_ptr = problem.grid_ptr();
  std::vector<double> u;
  if (const auto* c = std::get_if<double>(&config.initial_guess)) {
    u.assign(grid_ptr->size(), *c);
  } else {
    const auto& init = std::get<GridFunction>(config.initial_guess);
    if (init.size() != grid_ptr->size())
      throw std::invalid_argument("initial guess is on a different grid");
    u.assign(init.values().begin(), init.values().end());
  }

  const double lambda = config.damping;
  SolveReport report{GridFunction(grid_ptr, u), {}, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}};
  std::vector<double> next(u.size());

  for (std::size_t k = 0;; ++k) {
    const auto fu = detail::apply_operator(problem, u);
    double step = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      next[i] = (1.0 - lambda) * u[i] + lambda * fu[i];
      step = std::max(step, std::abs(next[i] - u[i]));
    }
    if (!detail::all_finite(next) || !std::isfinite(step)) {
      report.status = SolveStatus::non_finite;
      report.message = "iterate " + std::to_string(k + 1) + " is not finite";
      break;
    }
    report.step_trace.push_back(step);
    report.final_step_norm = step;
    if (step <= config.tolerance) {
      report.status = SolveStatus::converged;
      break;
    }
    if (k == config.max_iterations) {
      report.status = SolveStatus::max_iterations;
      report.message = "no convergence after " + std::to_string(k) + " iterations (last step " +
                       detail::format_real(step) + ")";
      break;
    }
    u.swap(next);
    report.iterations = k + 1;
  }

  report.converged = report.status == SolveStatus::converged;
  report.solution = GridFunction(grid_ptr, u);
  report.norm = sup_norm(report.solution);
  if (grid_ptr->size() >= 3) report.in_cone = in_cone(report.solution);
  if (detail::all_finite(problem.forcing(u))) {
    const auto res = residual(problem, report.solution);
    report.residual_interior_max = res.interior_max;
    report.residual_boundary = {res.boundary_slope, res.boundary_initial};
  } else {
    report.residual_interior_max = INFINITY;
    report.residual_boundary = {INFINITY, INFINITY};
  }
  if (report.converged) {
    if (!report.in_cone) report.warnings.push_back("solution is not in the cone");
    detail::positivity_warnings(problem, report.norm, report.warnings);
  }
  return report;
}

struct ShellSolution {
  SolveReport report;
  /// Index of the shell (lo, hi) with lo < ‖u‖ < hi, if any.
  std::optional<std::size_t> shell;
  /// Constant initial guess that produced this solution first.
  double start = 0.0;
};

/**
 * Picard solves from constant starts at the quartile points of each shell
 * (three per shell; a single start u ≡ 1 when `shells` is empty). Distinct
 * converged solutions (sup-distance > 10·tol) are returned sorted by norm.
 */
inline std::vector<ShellSolution> multi_start_solve(
    const BoundaryValueProblem& problem, const std::vector<std::pair<double, double>>& shells,
    const SolverConfig& config) {
  for (std::size_t i = 0; i < shells.size(); ++i) {
    if (!(shells[i].first < shells[i].second))
      throw std::invalid_argument("shell " + std::to_string(i) + " needs lo < hi");
    if (i > 0 && shells[i].first < shells[i - 1].second)
      throw std::invalid_argument("shells must be disjoint and ordered");
  }

  std::vector<double> starts;
  for (const auto& [lo, hi] : shells)
    for (double fr : {0.25, 0.5, 0.75}) starts.push_back(lo + fr * (hi - lo));
  if (starts.empty()) starts.push_back(1.0);

  std::vector<std::future<SolveReport>> jobs;
  for (double s : starts) {
    SolverConfig c = config;
    c.initial_guess = s;
    jobs.push_back(std::async(std::launch::async,
                              [&problem, c] { return picard_solve(problem, c); }));
  }

  std::vector<ShellSolution> out;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    auto rep = jobs[j].get();
    if (!rep.converged) continue;
    const bool duplicate = std::any_of(out.begin(), out.end(), [&](const ShellSolution& s) {
      return sup_norm((s.report.solution - rep.solution).values()) <= 10.0 * config.tolerance;
    });
    if (duplicate) continue;
    ShellSolution sol{std::move(rep), std::nullopt, starts[j]};
    for (std::size_t i = 0; i < shells.size(); ++i)
      if (sol.report.norm > shells[i].first && sol.report.norm < shells[i].second) sol.shell = i;
    out.push_back(std::move(sol));
  }
  std::stable_sort(out.begin(), out.end(), [](const ShellSolution& a, const ShellSolution& b) {
    return a.report.norm < b.report.norm;
  });
  return out;
}

}  // namespace tscale
