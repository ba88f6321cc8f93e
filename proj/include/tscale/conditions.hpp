#pragma once

/**
 * @file conditions.hpp
 * @brief Sufficient conditions for positive solutions in norm shells.
 *
 * With α = φ_q(2^{p-2}) φ_q(T) (T + 1), A(a) = (a - α ‖h‖^{1/(p-1)}) / (α a)
 * and B = φ_p(T - η):
 *
 *   upper condition at a:  max_{0<=u<=a} f(u) <= φ_p(a A(a))
 *   lower condition at b:  min_{0<=u<=b} f(u) >= φ_p(b B)
 *
 * Both holding with b < a predicts a positive solution with b < ‖u‖ < a.
 * Chained levels predict several solutions; geometric level sequences
 * tending to zero approximate the infinite-solvability conditions.
 *
 * Extrema of f are found by equispaced sampling, so a reported maximum is a
 * lower bound on the true maximum (and a minimum an upper bound). The
 * sample count travels with every report.
 */

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tscale/expr.hpp"
#include "tscale/phi.hpp"
#include "tscale/solver.hpp"

namespace tscale {

inline constexpr std::size_t kDefaultConditionSamples = 10001;

inline double alpha(double p, double T) {
  const PExponent e(p);
  if (!(T > 0.0)) throw std::invalid_argument("alpha needs T > 0");
  return phi_inverse(e, std::pow(2.0, p - 2.0)) * phi_inverse(e, T) * (T + 1.0);
}

/// May be <= 0 when h is large relative to a; checks then fail with a diagnostic.
inline double capital_A(double a, double p, double T, double h_sup) {
  if (!(a > 0.0)) throw std::invalid_argument("capital_A needs a > 0");
  if (h_sup < 0.0) throw std::invalid_argument("capital_A needs h_sup >= 0");
  const double al = alpha(p, T);
  return (a - al * std::pow(h_sup, 1.0 / (p - 1.0))) / (al * a);
}

inline double capital_B(double p, double T, double eta) {
  const PExponent e(p);
  if (!(eta > 0.0 && eta < T)) throw std::invalid_argument("capital_B needs 0 < eta < T");
  return phi(e, T - eta);
}

/// max |h(t)| over `samples` equispaced points of [0, T].
inline double h_sup_norm(const Expr& h, double T, std::size_t samples) {
  if (samples < 2) throw std::invalid_argument("h_sup_norm needs at least two samples");
  double m = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    const double t = T * static_cast<double>(k) / static_cast<double>(samples - 1);
    m = std::max(m, std::abs(h.eval(std::nullopt, t)));
  }
  return m;
}

struct CheckReport {
  std::string id;
  /// Level a (upper) or b (lower) the condition was evaluated at.
  double level = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool passed = false;
  std::size_t samples = 0;
  /// u where the sampled extremum of f was attained.
  double extremum_at = 0.0;
  std::string diagnostic;

  friend bool operator==(const CheckReport&, const CheckReport&) = default;
};

/// Constants and data shared by all checks on one problem.
struct ConditionContext {
  PExponent exponent{2.0};
  double horizon = 1.0;
  double eta = 0.5;
  Expr f;
  double h_sup = 0.0;

  static ConditionContext from(const ProblemSpec& spec,
                               std::size_t samples = kDefaultConditionSamples) {
    if (!(spec.eta > 0.0 && spec.eta < spec.horizon))
      throw std::invalid_argument("eta must satisfy 0 < eta < T");
    return {spec.exponent, spec.horizon, spec.eta, spec.f,
            h_sup_norm(spec.h, spec.horizon, samples)};
  }

  double alpha() const { return tscale::alpha(exponent.p(), horizon); }
  double A(double a) const { return capital_A(a, exponent.p(), horizon, h_sup); }
  double B() const { return capital_B(exponent.p(), horizon, eta); }
};

namespace detail {

struct Extremum {
  double value;
  double at;
};

template <class Better>
Extremum sample_f(const Expr& f, double hi, std::size_t samples, Better better) {
  if (samples < 2) throw std::invalid_argument("condition checks need at least two samples");
  Extremum best{f.eval(0.0, std::nullopt), 0.0};
  for (std::size_t k = 1; k < samples; ++k) {
    const double u = hi * static_cast<double>(k) / static_cast<double>(samples - 1);
    const double v = f.eval(u, std::nullopt);
    if (better(v, best.value)) best = {v, u};
  }
  return best;
}

}  // namespace detail

/// max_{[0,a]} f <= φ_p(a A(a))
inline CheckReport check_upper(const ConditionContext& ctx, double a, std::size_t samples,
                               std::string id = "(i)") {
  if (!(a > 0.0)) throw std::invalid_argument("upper condition needs a > 0");
  const auto ext = detail::sample_f(ctx.f, a, samples, [](double v, double b) { return v > b; });
  const double A = ctx.A(a);
  CheckReport r{std::move(id), a, ext.value, phi(ctx.exponent, a * A), false, samples, ext.at, {}};
  r.passed = r.lhs <= r.rhs;
  if (A <= 0.0) r.diagnostic = "h too large for this a (A = " + detail::format_real(A) + " <= 0)";
  return r;
}

/// min_{[0,b]} f >= φ_p(b B)
inline CheckReport check_lower(const ConditionContext& ctx, double b, std::size_t samples,
                               std::string id = "(ii)") {
  if (!(b > 0.0)) throw std::invalid_argument("lower condition needs b > 0");
  const auto ext = detail::sample_f(ctx.f, b, samples, [](double v, double m) { return v < m; });
  CheckReport r{std::move(id), b, ext.value, phi(ctx.exponent, b * ctx.B()), false, samples,
                ext.at, {}};
  r.passed = r.lhs >= r.rhs;
  return r;
}

/// Upper condition at a and lower condition at b, for 0 < b < a.
inline std::pair<CheckReport, CheckReport> check_existence_pair(const ConditionContext& ctx,
                                                                double a, double b,
                                                                std::size_t samples) {
  if (!(a > 0.0)) throw std::invalid_argument("existence check needs a > 0");
  if (!(b < a)) throw std::invalid_argument("existence check needs b < a");
  return {check_upper(ctx, a, samples, "(i)"), check_lower(ctx, b, samples, "(ii)")};
}

inline std::pair<CheckReport, CheckReport> check_existence_pair(double a, double b,
                                                                const ProblemSpec& spec,
                                                                std::size_t samples) {
  return check_existence_pair(ConditionContext::from(spec, samples), a, b, samples);
}

struct MultiplicityReport {
  /// One check per level, in level order: upper at odd, lower at even levels.
  std::vector<CheckReport> checks;
  bool all_passed = false;
  /// Predicted shells (a_i, a_{i+1}) when every check passes.
  std::vector<std::pair<double, double>> shells;
};

/**
 * Levels a_1 < ... < a_{k+1}: the upper condition at a_1, a_3, ... and the
 * lower condition at a_2, a_4, ...; all passing predicts k solutions, one per
 * shell (a_i, a_{i+1}).
 */
inline MultiplicityReport scan_multiplicity(const ConditionContext& ctx,
                                            const std::vector<double>& levels,
                                            std::size_t samples) {
  if (levels.size() < 2) throw std::invalid_argument("multiplicity scan needs at least two levels");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!(levels[i] > 0.0)) throw std::invalid_argument("levels must be positive");
    if (i > 0 && !(levels[i] > levels[i - 1]))
      throw std::invalid_argument("levels must be strictly increasing");
  }
  MultiplicityReport rep;
  rep.all_passed = true;
  for (std::size_t j = 0; j < levels.size(); ++j) {
    rep.checks.push_back(j % 2 == 0 ? check_upper(ctx, levels[j], samples, "(i)")
                                    : check_lower(ctx, levels[j], samples, "(ii)"));
    rep.all_passed = rep.all_passed && rep.checks.back().passed;
  }
  if (rep.all_passed)
    for (std::size_t j = 0; j + 1 < levels.size(); ++j) rep.shells.emplace_back(levels[j], levels[j + 1]);
  return rep;
}

inline MultiplicityReport scan_multiplicity(const std::vector<double>& levels,
                                            const ProblemSpec& spec, std::size_t samples) {
  return scan_multiplicity(ConditionContext::from(spec, samples), levels, samples);
}

struct LevelPair {
  std::size_t k = 0;
  double a = 0.0;
  double b = 0.0;
  CheckReport upper;
  CheckReport lower;
  bool passed = false;
};

struct InfiniteScanReport {
  std::vector<LevelPair> pairs;
  /// Longest run of consecutive passing pairs (first k and length; 0 if none).
  std::size_t run_start = 0;
  std::size_t run_length = 0;
};

/**
 * Interleaved geometric levels a_k = a0 r^{2k} > b_k = a0 r^{2k+1},
 * k = 1..k_max, each pair checked as an existence pair.
 */
inline InfiniteScanReport scan_infinite(const ConditionContext& ctx, double a0, double ratio,
                                        std::size_t k_max, std::size_t samples) {
  if (!(a0 > 0.0)) throw std::invalid_argument("scan_infinite needs a0 > 0");
  if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("ratio must lie in (0, 1)");
  if (k_max < 1) throw std::invalid_argument("k_max must be at least 1");

  InfiniteScanReport rep;
  std::size_t run = 0;
  for (std::size_t k = 1; k <= k_max; ++k) {
    const double a = a0 * std::pow(ratio, 2.0 * static_cast<double>(k));
    const double b = a0 * std::pow(ratio, 2.0 * static_cast<double>(k) + 1.0);
    auto [up, lo] = check_existence_pair(ctx, a, b, samples);
    const bool ok = up.passed && lo.passed;
    rep.pairs.push_back({k, a, b, std::move(up), std::move(lo), ok});
    run = ok ? run + 1 : 0;
    if (run > rep.run_length) {
      rep.run_length = run;
      rep.run_start = k + 1 - run;
    }
  }
  return rep;
}

inline InfiniteScanReport scan_infinite(const ProblemSpec& spec, double a0, double ratio,
                                        std::size_t k_max, std::size_t samples) {
  return scan_infinite(ConditionContext::from(spec, samples), a0, ratio, k_max, samples);
}

}  // namespace tscale
