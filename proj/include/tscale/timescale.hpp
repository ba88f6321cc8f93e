#pragma once

/**
 * @file timescale.hpp
 * @brief Time scales, their finite samplings, and delta/nabla calculus on grids.
 *
 * A time scale is a closed subset of the reals. Here it is described exactly
 * as an ordered union of closed intervals and isolated points starting at 0
 * and ending at the horizon T. Sampling subdivides the intervals into a
 * finite grid while keeping the density structure of the original set:
 * whether a grid point is right-dense or right-scattered is decided by the
 * exact description, never by grid spacing.
 *
 * @code
 * auto spec = tscale::TimeScaleSpec::parse("[0,0.5],{0.75},{1}");
 * auto grid = tscale::sample(spec, 0.1);
 * tscale::GridFunction u(grid, [](double t) { return t * t; });
 * double integral = tscale::delta_integral(u, 0.0, 1.0);
 * @endcode
 */

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tscale {

struct ClosedInterval {
  double lo = 0.0;
  double hi = 0.0;
  friend bool operator==(const ClosedInterval&, const ClosedInterval&) = default;
};

struct IsolatedPoint {
  double x = 0.0;
  friend bool operator==(const IsolatedPoint&, const IsolatedPoint&) = default;
};

using Component = std::variant<ClosedInterval, IsolatedPoint>;

/// Raised by the time-scale text parser; `term` is the zero-based term index.
class TimeScaleSyntaxError : public std::invalid_argument {
 public:
  TimeScaleSyntaxError(std::size_t term, const std::string& what)
      : std::invalid_argument("time scale term " + std::to_string(term) + ": " + what),
        term_(term) {}

  std::size_t term() const noexcept { return term_; }

 private:
  std::size_t term_;
};

namespace detail {

inline double component_lo(const Component& c) {
  return std::visit(
      [](const auto& v) {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, ClosedInterval>)
          return v.lo;
        else
          return v.x;
      },
      c);
}

inline double component_hi(const Component& c) {
  return std::visit(
      [](const auto& v) {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, ClosedInterval>)
          return v.hi;
        else
          return v.x;
      },
      c);
}

inline std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace detail

/**
 * Exact structural description of a time scale.
 *
 * Components are strictly increasing and pairwise disjoint, the smallest
 * point is 0 and the largest is the horizon T > 0.
 */
class TimeScaleSpec {
 public:
  explicit TimeScaleSpec(std::vector<Component> components) : components_(std::move(components)) {
    validate();
  }

  /// [0, T]
  static TimeScaleSpec interval(double horizon) {
    return TimeScaleSpec({ClosedInterval{0.0, horizon}});
  }

  /// {0, 1, ..., n}
  static TimeScaleSpec integers(long n) {
    if (n < 1) throw std::invalid_argument("integer time scale needs at least two points");
    std::vector<Component> c;
    c.reserve(static_cast<std::size_t>(n) + 1);
    for (long k = 0; k <= n; ++k) c.emplace_back(IsolatedPoint{static_cast<double>(k)});
    return TimeScaleSpec(std::move(c));
  }

  /// Parses comma-separated `[lo,hi]` and `{x}` terms; whitespace is ignored.
  static TimeScaleSpec parse(std::string_view text);

  const std::vector<Component>& components() const noexcept { return components_; }
  double horizon() const noexcept { return detail::component_hi(components_.back()); }

  bool contains(double x) const noexcept {
    for (const auto& c : components_) {
      if (x >= detail::component_lo(c) && x <= detail::component_hi(c)) return true;
    }
    return false;
  }

  bool is_discrete() const noexcept {
    return std::all_of(components_.begin(), components_.end(),
                       [](const Component& c) { return std::holds_alternative<IsolatedPoint>(c); });
  }

  /// Canonical text form, re-parseable by parse().
  std::string to_string() const {
    std::string out;
    for (std::size_t i = 0; i < components_.size(); ++i) {
      if (i) out += ',';
      if (const auto* iv = std::get_if<ClosedInterval>(&components_[i])) {
        out += '[' + detail::format_real(iv->lo) + ',' + detail::format_real(iv->hi) + ']';
      } else {
        out += '{' + detail::format_real(std::get<IsolatedPoint>(components_[i]).x) + '}';
      }
    }
    return out;
  }

  friend bool operator==(const TimeScaleSpec&, const TimeScaleSpec&) = default;

 private:
  void validate() const {
    if (components_.empty()) throw std::invalid_argument("time scale must be nonempty");
    double prev_hi = 0.0;
    for (std::size_t i = 0; i < components_.size(); ++i) {
      const double lo = detail::component_lo(components_[i]);
      const double hi = detail::component_hi(components_[i]);
      if (!std::isfinite(lo) || !std::isfinite(hi))
        throw std::invalid_argument("time scale component " + std::to_string(i) + " is not finite");
      if (std::holds_alternative<ClosedInterval>(components_[i]) && !(hi - lo > 0.0))
        throw std::invalid_argument("time scale interval " + std::to_string(i) + " has hi <= lo");
      if (i > 0 && !(lo > prev_hi))
        throw std::invalid_argument("time scale components " + std::to_string(i - 1) + " and " +
                                    std::to_string(i) + " overlap or are out of order");
      prev_hi = hi;
    }
    if (detail::component_lo(components_.front()) != 0.0)
      throw std::invalid_argument("time scale must start at 0");
    if (!(horizon() > 0.0)) throw std::invalid_argument("time scale horizon must be positive");
  }

  std::vector<Component> components_;
};

inline TimeScaleSpec TimeScaleSpec::parse(std::string_view text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;

  std::vector<Component> out;
  std::size_t pos = 0;
  std::size_t term = 0;

  auto read_number = [&](std::size_t& at) -> double {
    const char* begin = s.c_str() + at;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) throw TimeScaleSyntaxError(term, "expected a number");
    at += static_cast<std::size_t>(end - begin);
    return v;
  };
  auto expect = [&](std::size_t& at, char ch) {
    if (at >= s.size() || s[at] != ch)
      throw TimeScaleSyntaxError(term, std::string("expected '") + ch + "'");
    ++at;
  };

  if (s.empty()) throw TimeScaleSyntaxError(0, "empty time scale");
  while (true) {
    if (pos >= s.size()) throw TimeScaleSyntaxError(term, "missing term");
    if (s[pos] == '[') {
      ++pos;
      const double lo = read_number(pos);
      expect(pos, ',');
      const double hi = read_number(pos);
      expect(pos, ']');
      if (!(hi > lo)) throw TimeScaleSyntaxError(term, "interval needs lo < hi");
      out.emplace_back(ClosedInterval{lo, hi});
    } else if (s[pos] == '{') {
      ++pos;
      const double x = read_number(pos);
      expect(pos, '}');
      out.emplace_back(IsolatedPoint{x});
    } else {
      throw TimeScaleSyntaxError(term, "term must start with '[' or '{'");
    }
    if (pos == s.size()) break;
    expect(pos, ',');
    ++term;
  }
  try {
    return TimeScaleSpec(std::move(out));
  } catch (const std::invalid_argument& e) {
    throw TimeScaleSyntaxError(term, e.what());
  }
}

/**
 * Finite grid t_0 = 0 < ... < t_N = T on a time scale, with per-point
 * density flags taken from the exact description.
 */
class SampledTimeScale {
 public:
  static constexpr double kMinGap = 1e-12;

  const TimeScaleSpec& spec() const noexcept { return spec_; }
  std::span<const double> points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  /// Index of the last point, N.
  std::size_t last() const noexcept { return points_.size() - 1; }
  double operator[](std::size_t i) const { return points_[i]; }
  double horizon() const noexcept { return points_.back(); }

  bool right_dense(std::size_t i) const { return right_dense_.at(i); }
  bool left_dense(std::size_t i) const { return left_dense_.at(i); }
  bool right_scattered(std::size_t i) const { return !right_dense(i); }
  bool left_scattered(std::size_t i) const { return !left_dense(i); }

  /// Index of the grid point equal to x (within 1e-12 relative to the horizon).
  std::optional<std::size_t> index_of(double x) const {
    const auto it = std::lower_bound(points_.begin(), points_.end(), x);
    const double tol = 1e-12 * std::max(1.0, horizon());
    std::optional<std::size_t> best;
    double best_dist = tol;
    for (auto cand : {it, it == points_.begin() ? it : std::prev(it)}) {
      if (cand == points_.end()) continue;
      const double d = std::abs(*cand - x);
      if (d <= best_dist) {
        best_dist = d;
        best = static_cast<std::size_t>(cand - points_.begin());
      }
    }
    return best;
  }

 private:
  friend SampledTimeScale sample(const TimeScaleSpec&, double, std::span<const double>);

  SampledTimeScale(TimeScaleSpec spec, std::vector<double> points, std::vector<bool> rd,
                   std::vector<bool> ld)
      : spec_(std::move(spec)),
        points_(std::move(points)),
        right_dense_(std::move(rd)),
        left_dense_(std::move(ld)) {}

  TimeScaleSpec spec_;
  std::vector<double> points_;
  std::vector<bool> right_dense_;
  std::vector<bool> left_dense_;
};

/**
 * Subdivides every interval [lo, hi] into ceil((hi - lo)/resolution) equal
 * steps. Isolated points and interval endpoints appear exactly.
 *
 * `required` lists extra members of the time scale that must be grid points
 * (e.g. the boundary point eta). A required point close to a subdivision
 * node replaces that node; otherwise it is inserted.
 */
inline SampledTimeScale sample(const TimeScaleSpec& spec, double resolution,
                               std::span<const double> required = {}) {
  if (!(resolution > 0.0) || !std::isfinite(resolution))
    throw std::invalid_argument("sampling resolution must be positive");
  for (double x : required) {
    if (!spec.contains(x))
      throw std::invalid_argument("required point " + detail::format_real(x) +
                                  " is not a member of the time scale");
  }

  std::vector<double> pts;
  std::vector<bool> rd;
  std::vector<bool> ld;
  for (const auto& c : spec.components()) {
    if (const auto* iv = std::get_if<ClosedInterval>(&c)) {
      const double len = iv->hi - iv->lo;
      const auto steps =
          static_cast<std::size_t>(std::max(1.0, std::ceil(len / resolution - 1e-9)));
      std::vector<double> local(steps + 1);
      for (std::size_t k = 0; k <= steps; ++k)
        local[k] = iv->lo + len * static_cast<double>(k) / static_cast<double>(steps);
      local.front() = iv->lo;
      local.back() = iv->hi;

      const double snap = 1e-9 * len / static_cast<double>(steps);
      for (double x : required) {
        if (!(x > iv->lo && x < iv->hi)) continue;
        auto it = std::lower_bound(local.begin(), local.end(), x);
        if (*it == x) continue;
        auto near = it;
        if (it != local.begin() && std::abs(*std::prev(it) - x) < std::abs(*it - x))
          near = std::prev(it);
        const bool interior = near != local.begin() && std::next(near) != local.end();
        if (interior && std::abs(*near - x) <= snap)
          *near = x;
        else
          local.insert(it, x);
      }
      for (std::size_t k = 0; k < local.size(); ++k) {
        pts.push_back(local[k]);
        rd.push_back(k + 1 < local.size());
        ld.push_back(k > 0);
      }
    } else {
      pts.push_back(std::get<IsolatedPoint>(c).x);
      rd.push_back(false);
      ld.push_back(false);
    }
  }
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (!(pts[i] - pts[i - 1] > SampledTimeScale::kMinGap))
      throw std::invalid_argument("sampled grid has a step below 1e-12 near t = " +
                                  detail::format_real(pts[i]));
  }
  return SampledTimeScale(spec, std::move(pts), std::move(rd), std::move(ld));
}

using GridPtr = std::shared_ptr<const SampledTimeScale>;

inline GridPtr make_grid(const TimeScaleSpec& spec, double resolution,
                         std::span<const double> required = {}) {
  return std::make_shared<const SampledTimeScale>(sample(spec, resolution, required));
}

/// Forward jump. σ(T) = T.
inline double sigma(const SampledTimeScale& ts, std::size_t i) {
  if (i > ts.last()) throw std::out_of_range("sigma: point index out of range");
  if (ts.right_dense(i) || i == ts.last()) return ts[i];
  return ts[i + 1];
}

/// Backward jump. ρ(0) = 0.
inline double rho(const SampledTimeScale& ts, std::size_t i) {
  if (i > ts.last()) throw std::out_of_range("rho: point index out of range");
  if (ts.left_dense(i) || i == 0) return ts[i];
  return ts[i - 1];
}

/**
 * Real values aligned with the points of a sampled time scale.
 *
 * `extended()` lists indices whose values are one-sided extensions rather
 * than genuine derivative values (t_N for delta, t_0 for nabla derivatives).
 */
class GridFunction {
 public:
  GridFunction(GridPtr grid, std::vector<double> values, std::vector<std::size_t> extended = {})
      : grid_(std::move(grid)), values_(std::move(values)), extended_(std::move(extended)) {
    if (!grid_) throw std::invalid_argument("grid function needs a grid");
    if (values_.size() != grid_->size())
      throw std::invalid_argument("grid function length does not match grid");
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i]))
        throw std::domain_error("grid function value at index " + std::to_string(i) +
                                " is not finite");
    }
  }

  GridFunction(GridPtr grid, const std::function<double(double)>& fn)
      : GridFunction(grid, tabulate(*grid, fn)) {}

  static GridFunction constant(GridPtr grid, double c) {
    const std::size_t n = grid->size();
    return GridFunction(std::move(grid), std::vector<double>(n, c));
  }

  const SampledTimeScale& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<std::size_t>& extended() const noexcept { return extended_; }
  bool is_extended(std::size_t i) const {
    return std::find(extended_.begin(), extended_.end(), i) != extended_.end();
  }

  /// Pointwise a*x + b*y on a shared grid.
  friend GridFunction combine(double a, const GridFunction& x, double b, const GridFunction& y) {
    if (x.grid_ != y.grid_ && !std::ranges::equal(x.grid().points(), y.grid().points()))
      throw std::invalid_argument("grid functions live on different grids");
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * x.values_[i] + b * y.values_[i];
    return GridFunction(x.grid_, std::move(out));
  }

  friend GridFunction operator+(const GridFunction& x, const GridFunction& y) {
    return combine(1.0, x, 1.0, y);
  }
  friend GridFunction operator-(const GridFunction& x, const GridFunction& y) {
    return combine(1.0, x, -1.0, y);
  }

 private:
  static std::vector<double> tabulate(const SampledTimeScale& g,
                                      const std::function<double(double)>& fn) {
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(g[i]);
    return v;
  }

  GridPtr grid_;
  std::vector<double> values_;
  std::vector<std::size_t> extended_;
};

/**
 * Delta derivative. Exact at right-scattered points, first-order forward
 * difference at right-dense points; t_N copies t_{N-1} and is flagged.
 */
inline GridFunction delta_derivative(const GridFunction& u) {
  const auto& g = u.grid();
  if (g.size() < 2) throw std::invalid_argument("delta_derivative needs at least two points");
  const std::size_t n = g.last();
  std::vector<double> d(g.size());
  for (std::size_t i = 0; i < n; ++i) d[i] = (u[i + 1] - u[i]) / (g[i + 1] - g[i]);
  d[n] = d[n - 1];
  return GridFunction(u.grid_ptr(), std::move(d), {n});
}

/// Nabla derivative, mirror of delta_derivative; t_0 copies t_1 and is flagged.
inline GridFunction nabla_derivative(const GridFunction& u) {
  const auto& g = u.grid();
  if (g.size() < 2) throw std::invalid_argument("nabla_derivative needs at least two points");
  std::vector<double> d(g.size());
  for (std::size_t i = 1; i < g.size(); ++i) d[i] = (u[i] - u[i - 1]) / (g[i] - g[i - 1]);
  d[0] = d[1];
  return GridFunction(u.grid_ptr(), std::move(d), {0});
}

namespace detail {

inline std::pair<std::size_t, std::size_t> integration_range(const SampledTimeScale& g, double a,
                                                             double b) {
  if (a > b) throw std::invalid_argument("integral bounds must satisfy a <= b");
  const auto ia = g.index_of(a);
  const auto ib = g.index_of(b);
  if (!ia) throw std::invalid_argument("lower bound " + format_real(a) + " is not a grid point");
  if (!ib) throw std::invalid_argument("upper bound " + format_real(b) + " is not a grid point");
  return {*ia, *ib};
}

}  // namespace detail

/// Σ_{ia <= i < ib} u(t_i)(t_{i+1} - t_i), summed left to right.
inline double delta_integral_indices(const GridFunction& u, std::size_t ia, std::size_t ib) {
  if (ia > ib || ib >= u.size()) throw std::out_of_range("delta integral index range");
  const auto& g = u.grid();
  double sum = 0.0;
  for (std::size_t i = ia; i < ib; ++i) sum += u[i] * (g[i + 1] - g[i]);
  return sum;
}

/// Σ_{ia < i <= ib} u(t_i)(t_i - t_{i-1}), summed left to right.
inline double nabla_integral_indices(const GridFunction& u, std::size_t ia, std::size_t ib) {
  if (ia > ib || ib >= u.size()) throw std::out_of_range("nabla integral index range");
  const auto& g = u.grid();
  double sum = 0.0;
  for (std::size_t i = ia + 1; i <= ib; ++i) sum += u[i] * (g[i] - g[i - 1]);
  return sum;
}

/// Delta integral over [a, b); a and b must be grid points.
inline double delta_integral(const GridFunction& u, double a, double b) {
  const auto [ia, ib] = detail::integration_range(u.grid(), a, b);
  return delta_integral_indices(u, ia, ib);
}

/// Nabla integral over (a, b]; a and b must be grid points.
inline double nabla_integral(const GridFunction& u, double a, double b) {
  const auto [ia, ib] = detail::integration_range(u.grid(), a, b);
  return nabla_integral_indices(u, ia, ib);
}

inline double sup_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double sup_norm(const GridFunction& u) { return sup_norm(u.values()); }

}  // namespace tscale
