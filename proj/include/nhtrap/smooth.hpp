#pragma once
// One-dimensional smooth building blocks shared by the commutant, the frame
// cutoffs and the absorbing potential.  Every function is generic in the
// scalar type so the same code path yields values and exact derivatives.

#include "nhtrap/jet.hpp"

#include <cmath>

namespace nhtrap::smooth {

// Below this argument e^{-F/t} is under 1e-300 and its derivatives are
// numerically zero; clamping avoids 0*inf in the derivative path.
inline constexpr double kExpCutoff = 690.0;

/// chi0(t) = exp(-F/t) for t > 0, else 0.
template <typename T>
T chi0(const T& t, double F) {
  using std::exp;
  if (value_of(t) * kExpCutoff <= F) return T(0.0);
  return T(exp(T(-F / t)));
}

/// chi0'(t) = F t^{-2} exp(-F/t).
template <typename T>
T chi0_prime(const T& t, double F) {
  using std::exp;
  if (value_of(t) * kExpCutoff <= F) return T(0.0);
  return T(F / (t * t) * exp(T(-F / t)));
}

/// sqrt(chi0 chi0')(t) = sqrt(F) exp(-F/t) / t, written without a square root
/// so that it stays smooth where chi0 vanishes.
template <typename T>
T sqrt_chi0_chi0_prime(const T& t, double F) {
  using std::exp;
  if (value_of(t) * kExpCutoff <= F) return T(0.0);
  return T(std::sqrt(F) * exp(T(-F / t)) / t);
}

/// q(s) = exp(-1/s)/(1-s) on (0,1): the exponent of the unit step below.
template <typename T>
T step_exponent(const T& s) {
  using std::exp;
  return T(exp(T(-1.0 / s)) / (1.0 - s));
}

/// q'(s) = exp(-1/s) [1/(s^2 (1-s)) + 1/(1-s)^2].
template <typename T>
T step_exponent_prime(const T& s) {
  using std::exp;
  const T one_minus(1.0 - s);
  return T(exp(T(-1.0 / s)) * (1.0 / (s * s * one_minus) + 1.0 / (one_minus * one_minus)));
}

/// Smooth nonincreasing step: 1 for s <= 0, exp(-q(s)) on (0,1), 0 for s >= 1.
template <typename T>
T unit_step_down(const T& s) {
  using std::exp;
  const double sv = value_of(s);
  if (sv * kExpCutoff <= 1.0) return T(1.0);
  if (sv >= 1.0) return T(0.0);
  const T q = step_exponent(s);
  if (value_of(q) > kExpCutoff) return T(0.0);
  return T(exp(T(-q)));
}

/// Transition from 1 at t <= lo to 0 at t >= hi built from the unit step.
template <typename T>
T step_down(const T& t, double lo, double hi) {
  return unit_step_down(T((t - lo) / (hi - lo)));
}

/// Nonnegative chi1 with chi1^2 = -step' * step for step_down(t, lo, hi).
template <typename T>
T step_down_root(const T& t, double lo, double hi) {
  using std::exp;
  using std::sqrt;
  const double width = hi - lo;
  const T s((t - lo) / width);
  const double sv = value_of(s);
  if (sv * kExpCutoff <= 1.0 || sv >= 1.0) return T(0.0);
  const T q = step_exponent(s);
  if (value_of(q) > kExpCutoff / 2.0) return T(0.0);
  return T(sqrt(T(step_exponent_prime(s) / width)) * exp(T(-q)));
}

/// Even bump: 1 on |t| <= lo, 0 on |t| >= hi.  Uses t^2 so no kink at 0.
template <typename T>
T even_bump(const T& t, double lo, double hi) {
  return step_down(T(t * t), lo * lo, hi * hi);
}

}  // namespace nhtrap::smooth
