#pragma once
// The inverted harmonic oscillator p = xi^2 - x^2 with position-space
// complex absorption: the smallest model with a normally hyperbolic trapped
// set (the origin) and constant expansion/contraction rates.

#include "nhtrap/smooth.hpp"
#include "nhtrap/symbol.hpp"

#include <cmath>
#include <stdexcept>

namespace nhtrap {

/// w(x) = strength * chi0((|x| - x_abs) / width), chi0(t) = e^{-1/t}.
class AbsorbingPotential {
 public:
  AbsorbingPotential(double x_abs, double width, double strength)
      : x_abs_(x_abs), width_(width), strength_(strength) {
    if (!(x_abs > 0.0 && width > 0.0 && strength > 0.0))
      throw std::invalid_argument("absorbing_potential: parameters must be positive");
  }

  template <typename T>
  T operator()(const T& x) const {
    using std::abs;
    return T(strength_ * smooth::chi0(T((abs(x) - x_abs_) / width_), 1.0));
  }

  ClosedForm as_symbol() const {
    const AbsorbingPotential w = *this;
    return ClosedForm([w](const auto& x, const auto&) { return w(x); });
  }

  double x_abs() const { return x_abs_; }
  double width() const { return width_; }
  double strength() const { return strength_; }

 private:
  double x_abs_;
  double width_;
  double strength_;
};

inline AbsorbingPotential absorbing_potential(double x_abs, double width, double strength) {
  return {x_abs, width, strength};
}

struct ModelParams {
  double x_abs = 2.0;
  double width = 1.0;
  double strength = 10.0;
  double O_radius = 0.75;
  double energy_width = 0.5;
};

struct ModelSpec {
  ClosedForm p;
  ClosedForm phi_plus;
  ClosedForm phi_minus;
  double c_plus_sq;
  double c_minus_sq;
  AbsorbingPotential absorb;
  double O_radius;
  double energy_width;
};

inline ModelSpec inverted_oscillator(const ModelParams& params = {}) {
  if (!(params.O_radius > 0.0 && params.energy_width > 0.0))
    throw std::invalid_argument("inverted_oscillator: O_radius and energy_width must be positive");
  return ModelSpec{
      ClosedForm([](const auto& x, const auto& xi) {
        using T = std::decay_t<decltype(x)>;
        return T(xi * xi - x * x);
      }),
      ClosedForm([](const auto& x, const auto& xi) {
        using T = std::decay_t<decltype(x)>;
        return T(xi - x);
      }),
      ClosedForm([](const auto& x, const auto& xi) {
        using T = std::decay_t<decltype(x)>;
        return T(xi + x);
      }),
      2.0,
      2.0,
      AbsorbingPotential(params.x_abs, params.width, params.strength),
      params.O_radius,
      params.energy_width,
  };
}

/// Closed-form bicharacteristic of the inverted oscillator through `start`.
inline Point exact_flow(Point start, double t) {
  const double c = std::cosh(2.0 * t);
  const double s = std::sinh(2.0 * t);
  return {start.x * c + start.xi * s, start.xi * c + start.x * s};
}

}  // namespace nhtrap
