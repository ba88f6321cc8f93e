#pragma once

// The scalar p-Laplacian map s -> |s|^{p-2} s and its inverse.

#include <cmath>
#include <stdexcept>

namespace tscale {

/// Exponent p > 1 together with its Hölder conjugate q = p/(p-1).
class PExponent {
 public:
  explicit PExponent(double p) : p_(p) {
    if (!(p > 1.0) || !std::isfinite(p))
      throw std::invalid_argument("p-Laplacian exponent must satisfy p > 1");
    q_ = p / (p - 1.0);
  }

  double p() const noexcept { return p_; }
  double q() const noexcept { return q_; }

  /// The conjugate exponent as a PExponent.
  PExponent conjugate() const { return PExponent(q_); }

  friend bool operator==(const PExponent&, const PExponent&) = default;

 private:
  double p_;
  double q_;
};

namespace detail {

// |s|^{p-2} s; 0 maps to 0 by continuity.
inline double phi_unchecked(double p, double s) noexcept {
  if (s == 0.0) return 0.0;
  return std::exp((p - 2.0) * std::log(std::abs(s))) * s;
}

}  // namespace detail

inline double phi(const PExponent& e, double s) noexcept { return detail::phi_unchecked(e.p(), s); }

inline double phi_inverse(const PExponent& e, double s) noexcept {
  return detail::phi_unchecked(e.q(), s);
}

inline double phi(double p, double s) { return phi(PExponent(p), s); }
inline double phi_inverse(double p, double s) { return phi_inverse(PExponent(p), s); }

}  // namespace tscale
