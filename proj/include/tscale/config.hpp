#pragma once

/**
 * @file config.hpp
 * @brief Sectioned key-value run configuration.
 *
 * @code
 *   # comment
 *   [problem]
 *   p = 2
 *   T = 1
 *   eta = 0.5
 *   f = 1
 *   h = 0
 *   [timescale]
 *   kind = interval          # interval | integer | union
 *   spec = [0,0.5],{0.75},{1}  # required for kind = union
 *   resolution = 0.001
 *   [solver]
 *   tol = 1e-10
 *   max_iter = 1000
 *   damping = 1
 *   init = 0
 *   [check]
 *   a = 4
 *   b = 0.5
 *   levels = 1, 3.5, 25
 *   a0 = 1
 *   ratio = 0.5
 *   k_max = 8
 *   samples = 10001
 * @endcode
 *
 * Unknown sections or keys, duplicate keys and malformed values are errors
 * carrying the offending line number.
 */

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tscale/conditions.hpp"
#include "tscale/expr.hpp"
#include "tscale/solver.hpp"
#include "tscale/timescale.hpp"

namespace tscale {

class ConfigError : public std::invalid_argument {
 public:
  /// line == 0 means the error is not tied to a single line.
  ConfigError(std::size_t line, const std::string& what)
      : std::invalid_argument(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

enum class TimeScaleKind { interval, integer, union_ };

struct RunConfig {
  // [problem]
  double p = 2.0;
  double T = 1.0;
  double eta = 0.5;
  Expr f;
  Expr h;
  // [timescale]
  TimeScaleKind kind = TimeScaleKind::interval;
  std::optional<TimeScaleSpec> spec;
  double resolution = 1e-3;
  // [solver]
  double tol = 1e-10;
  std::size_t max_iter = 1000;
  double damping = 1.0;
  double init = 0.0;
  // [check]
  std::optional<double> a;
  std::optional<double> b;
  std::optional<std::vector<double>> levels;
  std::optional<double> a0;
  std::optional<double> ratio;
  std::optional<std::size_t> k_max;
  std::size_t samples = kDefaultConditionSamples;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

  TimeScaleSpec timescale() const {
    switch (kind) {
      case TimeScaleKind::interval:
        return TimeScaleSpec::interval(T);
      case TimeScaleKind::integer:
        return TimeScaleSpec::integers(std::lround(T));
      case TimeScaleKind::union_:
        return *spec;
    }
    throw std::logic_error("bad time scale kind");
  }

  ProblemSpec problem() const {
    return ProblemSpec{PExponent(p), T, eta, f, h, timescale(), resolution};
  }

  SolverConfig solver() const {
    SolverConfig c;
    c.tolerance = tol;
    c.max_iterations = max_iter;
    c.damping = damping;
    c.initial_guess = init;
    return c;
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline double parse_real(const std::string& v, std::size_t line, const std::string& key) {
  const char* begin = v.c_str();
  char* end = nullptr;
  const double x = std::strtod(begin, &end);
  if (v.empty() || end != begin + v.size() || !std::isfinite(x))
    throw ConfigError(line, "key '" + key + "' expects a finite number, got '" + v + "'");
  return x;
}

inline std::size_t parse_count(const std::string& v, std::size_t line, const std::string& key) {
  std::size_t used = 0;
  unsigned long long x = 0;
  try {
    if (v.empty() || v[0] == '-') throw std::invalid_argument(v);
    x = std::stoull(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty())
    throw ConfigError(line, "key '" + key + "' expects a non-negative integer, got '" + v + "'");
  return static_cast<std::size_t>(x);
}

}  // namespace detail

inline RunConfig parse_config(std::string_view text) {
  // section -> key -> (value, line)
  static const std::map<std::string, std::vector<std::string>> kKeys = {
      {"problem", {"p", "T", "eta", "f", "h"}},
      {"timescale", {"kind", "spec", "resolution"}},
      {"solver", {"tol", "max_iter", "damping", "init"}},
      {"check", {"a", "b", "levels", "a0", "ratio", "k_max", "samples"}},
  };
  std::map<std::string, std::pair<std::string, std::size_t>> entries;

  std::string section;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(line_no, "malformed section header");
      section = detail::trim(std::string_view(line).substr(1, line.size() - 2));
      if (!kKeys.count(section)) throw ConfigError(line_no, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(line_no, "expected 'key = value'");
    if (section.empty()) throw ConfigError(line_no, "key outside of any section");
    const std::string key = detail::trim(std::string_view(line).substr(0, eq));
    const std::string value = detail::trim(std::string_view(line).substr(eq + 1));
    const auto& allowed = kKeys.at(section);
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError(line_no, "unknown key '" + key + "' in [" + section + "]");
    if (value.empty()) throw ConfigError(line_no, "key '" + key + "' has an empty value");
    if (!entries.emplace(key, std::make_pair(value, line_no)).second)
      throw ConfigError(line_no, "duplicate key '" + key + "'");
  }

  RunConfig c;
  auto get = [&](const std::string& key) -> const std::pair<std::string, std::size_t>* {
    const auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
  };
  auto require = [&](const std::string& key, const std::string& sec) {
    const auto* e = get(key);
    if (!e) throw ConfigError(0, "missing required key '" + key + "' in [" + sec + "]");
    return e;
  };
  auto real = [&](const std::pair<std::string, std::size_t>* e, const std::string& key) {
    return detail::parse_real(e->first, e->second, key);
  };
  auto expr = [&](const std::pair<std::string, std::size_t>* e, const std::string& key) {
    try {
      return Expr::parse(e->first);
    } catch (const ExprSyntaxError& err) {
      throw ConfigError(e->second, "expression '" + key + "' " + err.what());
    }
  };

  c.p = real(require("p", "problem"), "p");
  c.T = real(require("T", "problem"), "T");
  c.eta = real(require("eta", "problem"), "eta");
  c.f = expr(require("f", "problem"), "f");
  if (const auto* e = get("h")) c.h = expr(e, "h");

  if (const auto* e = get("kind")) {
    if (e->first == "interval")
      c.kind = TimeScaleKind::interval;
    else if (e->first == "integer")
      c.kind = TimeScaleKind::integer;
    else if (e->first == "union")
      c.kind = TimeScaleKind::union_;
    else
      throw ConfigError(e->second, "kind must be interval, integer or union");
  }
  if (const auto* e = get("spec")) {
    if (c.kind != TimeScaleKind::union_)
      throw ConfigError(e->second, "key 'spec' is only allowed with kind = union");
    try {
      c.spec = TimeScaleSpec::parse(e->first);
    } catch (const std::invalid_argument& err) {
      throw ConfigError(e->second, std::string("spec: ") + err.what());
    }
  } else if (c.kind == TimeScaleKind::union_) {
    throw ConfigError(0, "missing required key 'spec' in [timescale] for kind = union");
  }
  c.resolution = get("resolution") ? real(get("resolution"), "resolution") : 1e-3 * c.T;

  if (const auto* e = get("tol")) c.tol = real(e, "tol");
  if (const auto* e = get("max_iter")) c.max_iter = detail::parse_count(e->first, e->second, "max_iter");
  if (const auto* e = get("damping")) c.damping = real(e, "damping");
  if (const auto* e = get("init")) c.init = real(e, "init");

  if (const auto* e = get("a")) c.a = real(e, "a");
  if (const auto* e = get("b")) c.b = real(e, "b");
  if (const auto* e = get("a0")) c.a0 = real(e, "a0");
  if (const auto* e = get("ratio")) c.ratio = real(e, "ratio");
  if (const auto* e = get("k_max")) c.k_max = detail::parse_count(e->first, e->second, "k_max");
  if (const auto* e = get("samples")) c.samples = detail::parse_count(e->first, e->second, "samples");
  if (const auto* e = get("levels")) {
    std::vector<double> lv;
    std::stringstream ss(e->first);
    std::string item;
    while (std::getline(ss, item, ',')) lv.push_back(detail::parse_real(detail::trim(item), e->second, "levels"));
    c.levels = std::move(lv);
  }

  // Cross-field constraints.
  auto line_of = [&](const std::string& key) {
    const auto* e = get(key);
    return e ? e->second : std::size_t{0};
  };
  if (!(c.p > 1.0)) throw ConfigError(line_of("p"), "key 'p' must satisfy p > 1");
  if (!(c.T > 0.0)) throw ConfigError(line_of("T"), "key 'T' must be positive");
  if (!(c.eta > 0.0 && c.eta < c.T))
    throw ConfigError(line_of("eta"), "keys 'eta' and 'T' must satisfy 0 < eta < T (eta = " +
                                          detail::format_real(c.eta) +
                                          ", T = " + detail::format_real(c.T) + ")");
  if (c.f.uses(Variable::t)) throw ConfigError(line_of("f"), "expression 'f' may use only u");
  if (c.h.uses(Variable::u)) throw ConfigError(line_of("h"), "expression 'h' may use only t");
  if (c.kind == TimeScaleKind::integer && (c.T != std::round(c.T) || c.T < 1.0))
    throw ConfigError(line_of("T"), "kind = integer needs an integer T >= 1");
  if (c.kind == TimeScaleKind::union_ && c.spec->horizon() != c.T)
    throw ConfigError(line_of("spec"), "keys 'spec' and 'T' disagree: time scale ends at " +
                                           detail::format_real(c.spec->horizon()));
  if (!c.timescale().contains(c.eta))
    throw ConfigError(line_of("eta"), "key 'eta' is not a point of the time scale");
  if (!(c.resolution > 0.0)) throw ConfigError(line_of("resolution"), "key 'resolution' must be positive");
  if (!(c.tol > 0.0)) throw ConfigError(line_of("tol"), "key 'tol' must be positive");
  if (!(c.damping > 0.0 && c.damping <= 1.0))
    throw ConfigError(line_of("damping"), "key 'damping' must lie in (0, 1]");
  if (c.samples < 2) throw ConfigError(line_of("samples"), "key 'samples' must be at least 2");
  if (c.a && c.b && !(*c.b < *c.a))
    throw ConfigError(line_of("b"), "keys 'a' and 'b' must satisfy 0 < b < a");
  if (c.a && !(*c.a > 0.0)) throw ConfigError(line_of("a"), "key 'a' must be positive");
  if (c.b && !(*c.b > 0.0)) throw ConfigError(line_of("b"), "key 'b' must be positive");
  if (c.ratio && !(*c.ratio > 0.0 && *c.ratio < 1.0))
    throw ConfigError(line_of("ratio"), "key 'ratio' must lie in (0, 1)");
  if (c.a0 && !(*c.a0 > 0.0)) throw ConfigError(line_of("a0"), "key 'a0' must be positive");
  if (c.k_max && *c.k_max < 1) throw ConfigError(line_of("k_max"), "key 'k_max' must be at least 1");
  if (c.levels) {
    for (std::size_t i = 0; i < c.levels->size(); ++i)
      if (!((*c.levels)[i] > 0.0) || (i > 0 && !((*c.levels)[i] > (*c.levels)[i - 1])))
        throw ConfigError(line_of("levels"), "key 'levels' must be positive and strictly increasing");
  }
  return c;
}

/// Canonical text form; parse_config(print_config(c)) == c.
inline std::string print_config(const RunConfig& c) {
  using detail::format_real;
  std::string out;
  auto kv = [&](const char* k, const std::string& v) { out += std::string(k) + " = " + v + "\n"; };
  out += "[problem]\n";
  kv("p", format_real(c.p));
  kv("T", format_real(c.T));
  kv("eta", format_real(c.eta));
  kv("f", c.f.to_string());
  kv("h", c.h.to_string());
  out += "\n[timescale]\n";
  kv("kind", c.kind == TimeScaleKind::interval  ? "interval"
             : c.kind == TimeScaleKind::integer ? "integer"
                                                : "union");
  if (c.spec) kv("spec", c.spec->to_string());
  kv("resolution", format_real(c.resolution));
  out += "\n[solver]\n";
  kv("tol", format_real(c.tol));
  kv("max_iter", std::to_string(c.max_iter));
  kv("damping", format_real(c.damping));
  kv("init", format_real(c.init));
  out += "\n[check]\n";
  if (c.a) kv("a", format_real(*c.a));
  if (c.b) kv("b", format_real(*c.b));
  if (c.levels) {
    std::string s;
    for (std::size_t i = 0; i < c.levels->size(); ++i) s += (i ? ", " : "") + format_real((*c.levels)[i]);
    kv("levels", s);
  }
  if (c.a0) kv("a0", format_real(*c.a0));
  if (c.ratio) kv("ratio", format_real(*c.ratio));
  if (c.k_max) kv("k_max", std::to_string(*c.k_max));
  kv("samples", std::to_string(c.samples));
  return out;
}

}  // namespace tscale
