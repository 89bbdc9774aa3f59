#pragma once

// C^3 bumps used by the grid cutoffs and the oscillation profile.

#include <array>
#include <cmath>

namespace wildeuler {

/// Septic smoothstep S(u) = 35u^4 - 84u^5 + 70u^6 - 20u^7 on [0, 1]:
/// S(0) = 0, S(1) = 1, and the first three derivatives vanish at both ends.
inline double smoothstep7(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double u2 = u * u;
  return u2 * u2 * (35.0 + u * (-84.0 + u * (70.0 - 20.0 * u)));
}

/// S and its first three derivatives.
inline std::array<double, 4> smoothstep7_jet(double u) {
  if (u <= 0.0) return {0.0, 0.0, 0.0, 0.0};
  if (u >= 1.0) return {1.0, 0.0, 0.0, 0.0};
  const double u2 = u * u;
  const double u3 = u2 * u;
  const double v = 1.0 - u;
  const double v2 = v * v;
  // S' = 140 u^3 (1-u)^3
  const double d1 = 140.0 * u3 * v2 * v;
  // S'' = 420 u^2 (1-u)^2 (1-2u)
  const double d2 = 420.0 * u2 * v2 * (1.0 - 2.0 * u);
  // S''' = 840 u (1-u) (1 - 5u + 5u^2)
  const double d3 = 840.0 * u * v * (1.0 - 5.0 * u + 5.0 * u2);
  return {smoothstep7(u), d1, d2, d3};
}

/// 1-D plateau bump of width h centred at 0: 1 on |s| <= 3h/8, 0 on |s| >= h/2.
struct Bump1D {
  double h = 1.0;

  bool on_plateau(double s) const { return std::abs(s) <= 0.375 * h; }
  bool in_support(double s) const { return std::abs(s) < 0.5 * h; }

  double value(double s) const { return smoothstep7((0.5 * h - std::abs(s)) / (0.125 * h)); }

  /// Value and derivatives up to order 3 with respect to s.
  std::array<double, 4> jet(double s) const {
    const double inv = 8.0 / h;
    const double sgn = s < 0.0 ? -1.0 : 1.0;
    const std::array<double, 4> S = smoothstep7_jet((0.5 * h - std::abs(s)) * inv);
    // u = (h/2 - |s|) 8/h, du/ds = -sgn 8/h
    const double du = -sgn * inv;
    return {S[0], S[1] * du, S[2] * du * du, S[3] * du * du * du};
  }
};

}  // namespace wildeuler
