#pragma once
// Hamilton flow integration and numerical trapped sets.

#include "nhtrap/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace nhtrap {

struct Trajectory {
  std::vector<double> times;   // chronological, strictly increasing
  std::vector<Point> points;   // points[i] is the state at times[i]
  double energy_drift = 0.0;   // max |p(gamma(t)) - p(gamma(0))|
  bool escaped = false;        // left the bounding box before t_final
  bool backward = false;       // integrated toward negative time

  /// State where the integration stopped (t_final or the escape point).
  const Point& final_point() const { return backward ? points.front() : points.back(); }
  double final_time() const { return backward ? times.front() : times.back(); }
};

struct FlowOptions {
  double box = 1e3;  // escape when |x| or |xi| exceeds this
};

namespace detail {

inline Point hamilton_field(const ClosedForm& p, const Point& z) {
  const SymbolGradient g = p.gradient(z.x, z.xi);
  return {g.dxi, -g.dx};
}

inline Point rk4_step(const ClosedForm& p, const Point& z, double dt) {
  const Point k1 = hamilton_field(p, z);
  const Point k2 = hamilton_field(p, {z.x + 0.5 * dt * k1.x, z.xi + 0.5 * dt * k1.xi});
  const Point k3 = hamilton_field(p, {z.x + 0.5 * dt * k2.x, z.xi + 0.5 * dt * k2.xi});
  const Point k4 = hamilton_field(p, {z.x + dt * k3.x, z.xi + dt * k3.xi});
  return {z.x + dt / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
          z.xi + dt / 6.0 * (k1.xi + 2.0 * k2.xi + 2.0 * k3.xi + k4.xi)};
}

inline std::size_t step_count(double t_final, double dt) {
  return static_cast<std::size_t>(std::ceil(std::abs(t_final) / dt - 1e-12));
}

}  // namespace detail

/// Fixed-step classical RK4 for (x', xi') = (d_xi p, -d_x p).
inline Trajectory hamilton_flow(const ClosedForm& p, Point start, double t_final, double dt,
                                const FlowOptions& opts = {}) {
  if (!(dt > 0.0)) throw std::invalid_argument("hamilton_flow: dt must be positive");
  const std::size_t steps = detail::step_count(t_final, dt);
  const double h = steps == 0 ? 0.0 : t_final / static_cast<double>(steps);
  Trajectory tr;
  tr.backward = t_final < 0.0;
  tr.times.reserve(steps + 1);
  tr.points.reserve(steps + 1);
  tr.times.push_back(0.0);
  tr.points.push_back(start);
  const double p0 = p(start.x, start.xi);
  Point z = start;
  for (std::size_t i = 1; i <= steps; ++i) {
    z = detail::rk4_step(p, z, h);
    tr.times.push_back(h * static_cast<double>(i));
    tr.points.push_back(z);
    tr.energy_drift = std::max(tr.energy_drift, std::abs(p(z.x, z.xi) - p0));
    if (std::abs(z.x) > opts.box || std::abs(z.xi) > opts.box) {
      tr.escaped = true;
      break;
    }
  }
  if (tr.backward) {
    std::reverse(tr.times.begin(), tr.times.end());
    std::reverse(tr.points.begin(), tr.points.end());
  }
  return tr;
}

inline Trajectory hamilton_flow(const SymbolField& p, Point start, double t_final, double dt,
                                const FlowOptions& opts = {}) {
  if (!p.has_closed_form())
    throw std::invalid_argument("hamilton_flow: symbol needs a closed form");
  return hamilton_flow(*p.closed_form(), start, t_final, dt, opts);
}

struct TrappedMask {
  PhaseGrid grid;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> forward;   // never absorbed for t >= 0
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> backward;  // never absorbed for t <= 0
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> trapped;

  void write_csv(std::ostream& os) const {
    os << "x,xi,forward,backward,trapped\n";
    os.precision(17);
    for (Eigen::Index j = 0; j < grid.n_x(); ++j)
      for (Eigen::Index k = 0; k < grid.n_x(); ++k)
        os << grid.x(j) << ',' << grid.xi(k) << ',' << int(forward(j, k)) << ','
           << int(backward(j, k)) << ',' << int(trapped(j, k)) << '\n';
  }
};

struct TrappedSetOptions {
  double energy_window = 1.0;  // nodes with |p| > window are marked untrapped
};

using AbsorbRegion = std::function<bool(double x, double xi)>;

inline AbsorbRegion outside_position(double x_abs) {
  return [x_abs](double x, double) { return std::abs(x) >= x_abs; };
}

namespace detail {

inline bool survives(const ClosedForm& p, const AbsorbRegion& absorb, Point z, double t_max,
                     double dt) {
  if (absorb(z.x, z.xi)) return false;
  const std::size_t steps = step_count(t_max, dt);
  const double h = steps == 0 ? 0.0 : t_max / static_cast<double>(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    z = rk4_step(p, z, h);
    if (absorb(z.x, z.xi)) return false;
  }
  return true;
}

}  // namespace detail

inline TrappedMask trapped_sets(const SymbolField& p, const AbsorbRegion& absorb, double t_max,
                                double dt, const TrappedSetOptions& opts = {}) {
  if (!(t_max > 0.0)) throw std::invalid_argument("trapped_sets: T_max must be positive");
  if (!(dt > 0.0)) throw std::invalid_argument("trapped_sets: dt must be positive");
  if (!p.has_closed_form()) throw std::invalid_argument("trapped_sets: symbol needs a closed form");
  const PhaseGrid& g = p.grid();
  const Eigen::Index n = g.n_x();
  TrappedMask mask{g, {}, {}, {}};
  mask.forward.setConstant(n, n, false);
  mask.backward.setConstant(n, n, false);
  mask.trapped.setConstant(n, n, false);
  const ClosedForm& f = *p.closed_form();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) {
      if (std::abs(p(j, k)) > opts.energy_window) continue;
      const Point z{g.x(j), g.xi(k)};
      mask.forward(j, k) = detail::survives(f, absorb, z, t_max, dt);
      mask.backward(j, k) = detail::survives(f, absorb, z, -t_max, dt);
      mask.trapped(j, k) = mask.forward(j, k) && mask.backward(j, k);
    }
  }
  return mask;
}

}  // namespace nhtrap
