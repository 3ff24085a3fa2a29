#pragma once
// Discretized phase space: a periodic position grid and its dual
// semiclassical momentum grid.

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nhtrap {

class PhaseGrid {
 public:
  PhaseGrid(double h, double x_min, double x_max, Eigen::Index n_x, double xi_max)
      : h_(h), x_min_(x_min), x_max_(x_max), n_x_(n_x), xi_max_(xi_max) {
    if (!(h > 0.0 && h <= 1.0)) throw std::invalid_argument("PhaseGrid: h must lie in (0,1]");
    if (!(x_min < x_max)) throw std::invalid_argument("PhaseGrid: x_min must be below x_max");
    if (n_x < 2 || (n_x & (n_x - 1)) != 0)
      throw std::invalid_argument("PhaseGrid: n_x must be a power of two >= 2");
    if (!(xi_max > 0.0)) throw std::invalid_argument("PhaseGrid: xi_max must be positive");
    if (momentum_limit() < xi_max * (1.0 - 1e-14))
      throw std::invalid_argument("PhaseGrid: momentum coverage h*pi/dx below xi_max");
  }

  double h() const { return h_; }
  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  Eigen::Index n_x() const { return n_x_; }
  double xi_max() const { return xi_max_; }

  double dx() const { return (x_max_ - x_min_) / static_cast<double>(n_x_); }
  double dxi() const { return h_ * 2.0 * std::numbers::pi / (static_cast<double>(n_x_) * dx()); }
  /// Largest representable momentum h*pi/dx.
  double momentum_limit() const { return h_ * std::numbers::pi / dx(); }

  double x(Eigen::Index j) const { return x_min_ + static_cast<double>(j) * dx(); }
  /// Signed momentum index for storage column k in [0, n_x).
  Eigen::Index signed_k(Eigen::Index k) const { return k - n_x_ / 2; }
  double xi(Eigen::Index k) const { return static_cast<double>(signed_k(k)) * dxi(); }

  Eigen::VectorXd x_nodes() const {
    Eigen::VectorXd v(n_x_);
    for (Eigen::Index j = 0; j < n_x_; ++j) v(j) = x(j);
    return v;
  }
  Eigen::VectorXd xi_nodes() const {
    Eigen::VectorXd v(n_x_);
    for (Eigen::Index k = 0; k < n_x_; ++k) v(k) = xi(k);
    return v;
  }

  bool operator==(const PhaseGrid&) const = default;

 private:
  double h_;
  double x_min_;
  double x_max_;
  Eigen::Index n_x_;
  double xi_max_;
};

inline constexpr Eigen::Index kDefaultGridCap = Eigen::Index{1} << 14;

/// Smallest power-of-two grid with at least min_points nodes whose momentum
/// range covers xi_max.  Throws std::range_error when n_cap would be exceeded.
inline PhaseGrid make_grid(double h, double x_min, double x_max, double xi_max,
                           Eigen::Index min_points, Eigen::Index n_cap = kDefaultGridCap) {
  if (!(h > 0.0 && h <= 1.0)) throw std::invalid_argument("make_grid: h must lie in (0,1]");
  if (!(x_min < x_max)) throw std::invalid_argument("make_grid: x_min must be below x_max");
  if (!(xi_max > 0.0)) throw std::invalid_argument("make_grid: xi_max must be positive");
  const double length = x_max - x_min;
  Eigen::Index n = 2;
  while (n < min_points || h * std::numbers::pi * static_cast<double>(n) / length < xi_max) {
    if (n >= n_cap) {
      throw std::range_error("make_grid: resolution request exceeds n_cap = " +
                             std::to_string(n_cap));
    }
    n *= 2;
  }
  if (n > n_cap) throw std::range_error("make_grid: min_points exceeds n_cap");
  return PhaseGrid(h, x_min, x_max, n, xi_max);
}

}  // namespace nhtrap
