#pragma once

// Reference implementations used to cross-check the optimized kernels.
// Nothing here calls the quadrature, φ or operator code it is meant to check.

#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tscale/solver.hpp"
#include "tscale/timescale.hpp"

namespace tscale::testkit {

/// sign(s) |s|^{p-1}, via pow rather than the exp/log route.
inline double direct_phi(double p, double s) {
  if (s == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(s), p - 1.0), s);
}

inline double direct_phi_inverse(double p, double s) { return direct_phi(p / (p - 1.0), s); }

inline double literal_delta_sum(std::span<const double> t, std::span<const double> v,
                                std::size_t from, std::size_t to) {
  double s = 0.0;
  for (std::size_t i = from; i < to; ++i) s = s + v[i] * (t[i + 1] - t[i]);
  return s;
}

inline double literal_nabla_sum(std::span<const double> t, std::span<const double> v,
                                std::size_t from, std::size_t to) {
  double s = 0.0;
  for (std::size_t i = from + 1; i <= to; ++i) s = s + v[i] * (t[i] - t[i - 1]);
  return s;
}

/**
 * Brute-force F: for every t_i and every s_j < t_i the inner integral over
 * (s_j, T] is re-summed from scratch. O(N^2) per point, O(N^3) overall.
 */
inline std::vector<double> naive_apply_F(const BoundaryValueProblem& problem,
                                         std::span<const double> u) {
  const auto t = problem.grid().points();
  const std::size_t n = t.size() - 1;
  const double p = problem.exponent().p();
  const auto& spec = problem.spec();

  std::vector<double> g(t.size());
  for (std::size_t r = 0; r < t.size(); ++r)
    g[r] = spec.f.eval(u[r] < 0.0 ? 0.0 : u[r], std::nullopt) + spec.h.eval(std::nullopt, t[r]);

  auto inner = [&](std::size_t s) {
    double acc = 0.0;
    for (std::size_t r = s + 1; r <= n; ++r) acc += g[r] * (t[r] - t[r - 1]);
    return acc;
  };

  std::size_t eta = 0;
  while (t[eta] != spec.eta) ++eta;

  std::vector<double> out(t.size());
  for (std::size_t i = 0; i <= n; ++i) {
    double outer = 0.0;
    for (std::size_t j = 0; j < i; ++j) outer += direct_phi_inverse(p, inner(j)) * (t[j + 1] - t[j]);
    out[i] = direct_phi_inverse(p, inner(eta)) + outer;
  }
  return out;
}

/// Exact solution for p = 2, f ≡ c, h ≡ 0 on [0, T]: c(T - η) + c(T t - t²/2).
struct ClosedFormSolution {
  double c;
  double horizon;
  double eta;

  double operator()(double t) const { return c * (horizon - eta) + c * (horizon * t - t * t / 2.0); }
  double derivative(double t) const { return c * (horizon - t); }
};

inline ClosedFormSolution closed_form_solution(double c, double T, double eta) {
  if (!(c > 0.0)) throw std::invalid_argument("closed form needs c > 0");
  if (!(eta > 0.0 && eta < T)) throw std::invalid_argument("closed form needs 0 < eta < T");
  return {c, T, eta};
}

struct FiniteDifferenceReport {
  double max_error = 0.0;
  double worst_t = 0.0;
  std::size_t points_checked = 0;
};

/// max over right-dense points of |u^Δ - u'| on the sampled scale.
inline FiniteDifferenceReport finite_difference_check(const std::function<double(double)>& u,
                                                      const std::function<double(double)>& du,
                                                      const TimeScaleSpec& spec,
                                                      double resolution) {
  auto grid = make_grid(spec, resolution);
  const auto d = delta_derivative(GridFunction(grid, u));
  FiniteDifferenceReport r;
  for (std::size_t i = 0; i < grid->last(); ++i) {
    if (!grid->right_dense(i)) continue;
    const double e = std::abs(d[i] - du((*grid)[i]));
    ++r.points_checked;
    if (e > r.max_error) {
      r.max_error = e;
      r.worst_t = (*grid)[i];
    }
  }
  return r;
}

// Constants recomputed straight from their defining formulas.
inline double direct_alpha(double p, double T) {
  const double q = p / (p - 1.0);
  return std::pow(std::pow(2.0, p - 2.0), q - 1.0) * std::pow(T, q - 1.0) * (T + 1.0);
}

inline double direct_A(double a, double p, double T, double h_sup) {
  const double al = direct_alpha(p, T);
  return (a - al * std::pow(h_sup, 1.0 / (p - 1.0))) / (al * a);
}

inline double direct_B(double p, double T, double eta) { return std::pow(T - eta, p - 1.0); }

/// Sampled max (or min) of f on [0, hi] with a loop of its own.
inline double direct_extremum(const Expr& f, double hi, std::size_t samples, bool want_max) {
  double best = want_max ? -INFINITY : INFINITY;
  for (std::size_t k = 0; k < samples; ++k) {
    const double v = f.eval(hi * (double(k) / double(samples - 1)), std::nullopt);
    best = want_max ? std::max(best, v) : std::min(best, v);
  }
  return best;
}

/// A randomized problem instance with its generating parameters for replay.
struct RandomInstance {
  ProblemSpec spec;
  std::string description;
};

/**
 * Mixed interval / isolated-point scale with at most `max_points` grid
 * points, p from {1.5, 2, 3}, positive f(u) and h(t).
 */
inline RandomInstance random_instance(std::mt19937_64& rng, std::size_t max_points = 64) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double ps[] = {1.5, 2.0, 3.0};
  const double p = ps[std::uniform_int_distribution<int>(0, 2)(rng)];

  // Alternate intervals and isolated points, left to right from 0.
  std::vector<Component> comps;
  double x = 0.0;
  const int pieces = std::uniform_int_distribution<int>(1, 4)(rng);
  std::size_t est_points = 0;
  const double res = 0.05 + 0.1 * unit(rng);
  for (int k = 0; k < pieces; ++k) {
    const bool interval = unit(rng) < 0.6;
    if (interval) {
      const double len = 0.2 + 0.8 * unit(rng);
      comps.emplace_back(ClosedInterval{x, x + len});
      est_points += static_cast<std::size_t>(std::ceil(len / res)) + 1;
      x += len;
    } else {
      comps.emplace_back(IsolatedPoint{x});
      est_points += 1;
    }
    x += 0.1 + 0.5 * unit(rng);
  }
  // Closing isolated point guarantees T is a member and the scale has >= 2 points.
  comps.emplace_back(IsolatedPoint{x});
  est_points += 1;
  if (est_points > max_points) return random_instance(rng, max_points);

  TimeScaleSpec ts(comps);
  const double T = ts.horizon();
  auto probe = sample(ts, res);
  // eta: a random interior grid point.
  if (probe.size() < 3) return random_instance(rng, max_points);
  const std::size_t ieta = std::uniform_int_distribution<std::size_t>(1, probe.size() - 2)(rng);
  const double eta = probe[ieta];

  const double c0 = 0.2 + unit(rng), c1 = unit(rng), c2 = 0.5 * unit(rng);
  const double h0 = 0.1 + unit(rng), h1 = unit(rng);
  std::ostringstream f, h;
  f.precision(17);
  h.precision(17);
  f << c0 << " + " << c1 << " * sin(u)^2 + " << c2 << " * u / (1 + u)";
  h << h0 << " + " << h1 << " * cos(t)^2";

  ProblemSpec spec{PExponent(p), T, eta, Expr::parse(f.str()), Expr::parse(h.str()), ts, res};
  std::ostringstream d;
  d.precision(17);
  d << "p=" << p << " T=" << T << " eta=" << eta << " res=" << res << " scale=" << ts.to_string()
    << " f=" << f.str() << " h=" << h.str();
  return {std::move(spec), d.str()};
}

}  // namespace tscale::testkit
