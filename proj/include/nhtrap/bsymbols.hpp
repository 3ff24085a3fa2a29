#pragma once
// Symbol-level b-calculus computations on a synthetic structural model.
//
// Coordinates X = (rho, tau, u+, u-, v): rho is the boundary-defining weight,
// tau the normal coordinate, u+- the defining functions of the stable and
// unstable manifolds and v the rescaled principal symbol.  The flow is the
// total field  V + rho W  whose components are prescribed in closed form.

#include "nhtrap/commutant.hpp"
#include "nhtrap/jet.hpp"
#include "nhtrap/smooth.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace nhtrap {

struct BPoint {
  double rho = 1.0;
  double tau = 0.0;
  double u_plus = 0.0;
  double u_minus = 0.0;
  double v = 0.0;
};

using BFunction = std::function<double(const BPoint&)>;

struct BStructuralModel {
  double m = 2.0;
  double c_d_sq = 2.0;
  double c_plus_sq = 2.0;
  double c_minus_sq = 2.0;
  double beta_plus = 0.5;
  double nu_plus = 0.3;
  double nu_minus = 0.3;
  double alpha_t = 0.2;    // V rho = alpha_t tau rho
  double alpha_t1 = 0.1;   // W rho = alpha_t1 tau rho
  double alpha_d1 = 0.0;   // W tau = alpha_d1 tau
  double p1 = 0.0;         // subprincipal part: p0_hat = v - rho^{m+1} p1
  BFunction w_plus = [](const BPoint&) { return 0.0; };   // W u+
  BFunction w_minus = [](const BPoint&) { return 0.0; };  // W u-

  double p0_hat(const BPoint& X) const { return X.v - std::pow(X.rho, m + 1.0) * p1; }

  /// Components of V + rho W applied to the five coordinates.
  std::array<double, 5> field(const BPoint& X) const {
    const double p0 = p0_hat(X);
    return {
        alpha_t * X.tau * X.rho + X.rho * alpha_t1 * X.tau * X.rho,
        -c_d_sq * X.tau + X.rho * alpha_d1 * X.tau,
        -c_plus_sq * X.u_plus + beta_plus * X.tau + nu_plus * p0 + X.rho * w_plus(X),
        c_minus_sq * X.u_minus + nu_minus * p0 + X.rho * w_minus(X),
        m * alpha_t * X.tau * X.v + X.rho * m * alpha_t1 * X.tau * X.v,
    };
  }
};

enum class BOrientation { kForward, kReversed };

struct BCommutantParams {
  double s = 1.0;
  double r = 0.0;
  double kappa = 0.05;
  double R = 0.25;
  double F = 1.0;
  double M = 2.0;
  double psi_width = 0.5;
  BOrientation orientation = BOrientation::kForward;

  double sigma() const { return orientation == BOrientation::kForward ? 1.0 : -1.0; }
};

namespace detail {

template <typename T>
T power_or_one(const T& x, double e) {
  using std::pow;
  if (e == 0.0) return T(1.0);
  return T(pow(x, e));
}

}  // namespace detail

/// Phi and Theta arguments of chi0 and chi.  Forward: rho_+ = u+^2 + M tau,
/// Phi = rho_+ - u-^2 + kappa, Theta = rho_+.  Reversed swaps the roles.
template <typename T>
std::pair<T, T> b_arguments(const BCommutantParams& prm, const T& tau, const T& up, const T& um) {
  const T rho_plus(up * up + prm.M * tau);
  const T um2(um * um);
  if (prm.orientation == BOrientation::kForward) return {T(rho_plus - um2 + prm.kappa), rho_plus};
  return {T(um2 - rho_plus + prm.kappa), um2};
}

inline CutoffFamily b_cutoffs(const BCommutantParams& prm) {
  return build_cutoffs(prm.kappa, prm.R, prm.F, prm.psi_width);
}

/// a = rho^{-s+(m-1)/2} tau^{-r} chi0(Phi) chi(Theta) psi(v).
template <typename T>
T b_commutant(const BStructuralModel& mdl, const BCommutantParams& prm, const T& rho, const T& tau,
              const T& up, const T& um, const T& v) {
  const CutoffFamily cut = b_cutoffs(prm);
  const auto [Phi, Theta] = b_arguments(prm, tau, up, um);
  return T(detail::power_or_one(rho, -prm.s + 0.5 * (mdl.m - 1.0)) *
           detail::power_or_one(tau, -prm.r) * cut.chi0(Phi) * cut.chi(Theta) * cut.psi(v));
}

/// Right-hand side contributions, each already carrying its overall sign.
struct BTerms {
  double squares_plus = 0.0;   // -sigma c+^2 a+^2
  double squares_minus = 0.0;  // -sigma c-^2 a-^2
  double a_d = 0.0;            // -sigma a_d^2
  double a_r = 0.0;            // -sigma a_r^2
  double g_plus = 0.0;         // 2 sigma g+ a+
  double g_minus = 0.0;        // 2 sigma g- a-
  double j_plus = 0.0;         // 2 sigma a+ j+ p
  double j_minus = 0.0;        // 2 sigma a- j- p
  double e = 0.0;
  double e_tilde = 0.0;

  static constexpr int kCount = 10;
  std::array<double, kCount> as_array() const {
    return {squares_plus, squares_minus, a_d, a_r, g_plus, g_minus, j_plus, j_minus, e, e_tilde};
  }
  static constexpr std::array<const char*, kCount> names() {
    return {"squares_plus", "squares_minus", "a_d", "a_r", "g_plus",
            "g_minus",      "j_plus",        "j_minus", "e", "e_tilde"};
  }
};

struct BTermOverrides {
  double c_d_sq_delta = 0.0;  // perturbation of c_d^2 on the right side only
};

/// Radicands of a_d^2 and a_r^2 divided by their manifestly nonnegative
/// weight factors; both must be >= 0 wherever a != 0.
struct BRadicands {
  double a_d = 0.0;
  double a_r = 0.0;
};

struct BEvaluation {
  double lhs = 0.0;  // rho^{1-m} * 1/4 (V + rho W)(a^2)
  BTerms terms;
  BRadicands radicands;
  bool on_support = false;
  double a_r_unweighted = 0.0;  // a_r / (rho^{-s} tau^{-r})
};

inline BEvaluation evaluate_b_identity(const BStructuralModel& mdl, const BCommutantParams& prm,
                                       const BPoint& X, const BTermOverrides& ovr = {}) {
  using std::sqrt;
  const double sigma = prm.sigma();
  const double k = -2.0 * prm.s + mdl.m - 1.0;
  const CutoffFamily cut = b_cutoffs(prm);
  BEvaluation ev;

  // Left side through jets in all five coordinates.
  const Jet5 a = b_commutant<Jet5>(mdl, prm, make_variable<5>(X.rho, 0), make_variable<5>(X.tau, 1),
                                   make_variable<5>(X.u_plus, 2), make_variable<5>(X.u_minus, 3),
                                   make_variable<5>(X.v, 4));
  const std::array<double, 5> Vx = mdl.field(X);
  double Va = 0.0;
  for (int i = 0; i < 5; ++i) Va += Vx[static_cast<std::size_t>(i)] * a.derivatives()(i);
  ev.lhs = std::pow(X.rho, 1.0 - mdl.m) * 0.5 * a.value() * Va;
  ev.on_support = a.value() != 0.0;

  // Right side from the closed-form building blocks.
  const auto [Phi, Theta] = b_arguments(prm, X.tau, X.u_plus, X.u_minus);
  const double c0 = cut.chi0(Phi);
  const double c0p = cut.chi0_prime(Phi);
  const double ch = cut.chi(Theta);
  const double ch1 = cut.chi1(Theta);
  const Jet<1> psi_jet = cut.psi(make_variable<1>(X.v, 0));
  const double ps = psi_jet.value();
  const double psp = psi_jet.derivatives()(0);
  const double S = cut.sqrt_chi0_chi0_prime(Phi) * ch * ps;

  const double tau_w = detail::power_or_one(X.tau, -prm.r);
  const double base = std::pow(X.rho, -prm.s) * tau_w;  // rho^{-s} tau^{-r}
  const double W2 = base * base;
  const double a_plus = base * X.u_plus * S;
  const double a_minus = base * X.u_minus * S;
  const double rho_m = std::pow(X.rho, mdl.m);
  const double alpha_sum = mdl.alpha_t + X.rho * mdl.alpha_t1;
  const double c_d_sq = mdl.c_d_sq + ovr.c_d_sq_delta;

  ev.radicands.a_d = (prm.M * c_d_sq / 2.0 - mdl.beta_plus * X.u_plus -
                      X.rho * prm.M * mdl.alpha_d1 / 2.0) * c0 * c0p -
                     sigma * 0.25 * k * alpha_sum * c0 * c0;
  ev.radicands.a_r = -sigma * (prm.r / 2.0) * (c_d_sq - X.rho * mdl.alpha_d1);
  const double a_d_sq = W2 * X.tau * ev.radicands.a_d * ch * ch * ps * ps;
  const double a_r_sq = ev.radicands.a_r * W2 * c0 * c0 * ch * ch * ps * ps;
  ev.a_r_unweighted = sqrt(std::max(0.0, ev.radicands.a_r)) * c0 * ch * ps;

  const double g_plus = 0.5 * std::pow(X.rho, 1.0 - prm.s) * tau_w *
                        (mdl.w_plus(X) - mdl.nu_plus * rho_m * mdl.p1) * S;
  const double g_minus = -0.5 * std::pow(X.rho, 1.0 - prm.s) * tau_w *
                         (mdl.w_minus(X) - mdl.nu_minus * rho_m * mdl.p1) * S;
  const double j_plus = 0.5 * mdl.nu_plus * std::pow(X.rho, -prm.s + mdl.m) * tau_w * S;
  const double j_minus = -0.5 * mdl.nu_minus * std::pow(X.rho, -prm.s + mdl.m) * tau_w * S;
  const double p = X.v / rho_m;

  const double V_theta = prm.orientation == BOrientation::kForward
                             ? 2.0 * X.u_plus * Vx[2] + prm.M * Vx[1]
                             : 2.0 * X.u_minus * Vx[3];

  BTerms& t = ev.terms;
  t.squares_plus = -sigma * mdl.c_plus_sq * a_plus * a_plus;
  t.squares_minus = -sigma * mdl.c_minus_sq * a_minus * a_minus;
  t.a_d = -sigma * a_d_sq;
  t.a_r = -sigma * a_r_sq;
  t.g_plus = 2.0 * sigma * g_plus * a_plus;
  t.g_minus = 2.0 * sigma * g_minus * a_minus;
  t.j_plus = 2.0 * sigma * a_plus * j_plus * p;
  t.j_minus = 2.0 * sigma * a_minus * j_minus * p;
  t.e = -0.5 * W2 * V_theta * ch1 * ch1 * c0 * c0 * ps * ps;
  t.e_tilde = 0.5 * mdl.m * W2 * X.v * alpha_sum * X.tau * c0 * c0 * ch * ch * ps * psp;
  return ev;
}

struct BGrid {
  double rho_min = 0.5, rho_max = 1.0;
  double tau_max = 0.2;
  double u_max = 0.6;
  double v_max = 0.4;
  int nodes = 9;

  static std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    return out;
  }

  /// All tensor nodes; tau = 0 is dropped when the tau weight is singular.
  std::vector<BPoint> points(bool positive_tau_only) const {
    if (nodes < 2) throw std::invalid_argument("BGrid: need at least 2 nodes per axis");
    std::vector<BPoint> out;
    for (double rho : linspace(rho_min, rho_max, nodes))
      for (double tau : linspace(0.0, tau_max, nodes)) {
        if (positive_tau_only && tau <= 0.0) continue;
        for (double up : linspace(-u_max, u_max, nodes))
          for (double um : linspace(-u_max, u_max, nodes))
            for (double v : linspace(-v_max, v_max, nodes)) out.push_back({rho, tau, up, um, v});
      }
    return out;
  }
};

struct BVerification {
  double max_residual = 0.0;
  double max_lhs = 0.0;
  std::size_t points = 0;
  std::array<double, BTerms::kCount> max_term{};  // max |term| per RHS term
  double a_r_at_gamma = std::numeric_limits<double>::quiet_NaN();
};

struct ParabolicBox {
  double u_max = 0.5;
  double tau_max = 0.2;
  double v_max = 0.4;
  int nodes = 201;
};

struct ParabolicResult {
  double margin = 0.0;       // min over the box of the slack (>= 0 means the bound holds)
  double M_threshold = 0.0;  // smallest M with nonnegative margin
};

/// Slack of  V rho_+ - 2 nu+ u+ v <= -c~^2 rho_+  with c~^2 = min(c+^2, c_d^2)/2.
inline double parabolic_margin(const BStructuralModel& mdl, double M, const ParabolicBox& box) {
  const double ct2 = std::min(mdl.c_plus_sq, mdl.c_d_sq) / 2.0;
  double worst = std::numeric_limits<double>::infinity();
  const auto us = BGrid::linspace(-box.u_max, box.u_max, box.nodes);
  const auto taus = BGrid::linspace(0.0, box.tau_max, box.nodes);
  const auto vs = BGrid::linspace(-box.v_max, box.v_max, std::min(box.nodes, 9));
  for (double u : us)
    for (double tau : taus)
      for (double v : vs) {
        const double Vu = -mdl.c_plus_sq * u + mdl.beta_plus * tau + mdl.nu_plus * v;
        const double V_rho_plus = 2.0 * u * Vu + M * (-mdl.c_d_sq * tau);
        const double lhs = V_rho_plus - 2.0 * mdl.nu_plus * u * v;
        const double rho_plus = u * u + M * tau;
        worst = std::min(worst, -ct2 * rho_plus - lhs);
      }
  return worst;
}

inline ParabolicResult parabolic_check(const BStructuralModel& mdl, double M,
                                       const ParabolicBox& box = {}) {
  constexpr double kSlack = 1e-13;
  constexpr double kMaxM = 1e6;
  double hi = 1e-6;
  while (parabolic_margin(mdl, hi, box) < -kSlack) {
    hi *= 2.0;
    if (hi > kMaxM) throw std::runtime_error("parabolic_check: no M <= 1e6 works");
  }
  double lo = 0.0;
  for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (parabolic_margin(mdl, mid, box) >= -kSlack ? hi : lo) = mid;
  }
  return {parabolic_margin(mdl, M, box), hi};
}

inline BVerification verify_b_identity(const BStructuralModel& mdl, const BCommutantParams& prm,
                                       const BGrid& grid, unsigned disabled_terms = 0,
                                       const BTermOverrides& ovr = {}) {
  if (!(prm.kappa > 0.0 && prm.R > 0.0 && prm.F > 0.0 && prm.M > 0.0))
    throw std::invalid_argument("verify_b_decomposition: kappa, R, F, M must be positive");
  if (prm.sigma() * prm.r > 0.0)
    throw std::invalid_argument("verify_b_decomposition: weight sign must satisfy sigma*r <= 0");
  BVerification out;
  for (const BPoint& X : grid.points(prm.r > 0.0)) {
    const BEvaluation ev = evaluate_b_identity(mdl, prm, X, ovr);
    if (ev.on_support && (ev.radicands.a_d < -1e-14 || ev.radicands.a_r < -1e-14)) {
      throw std::domain_error(
          "verify_b_decomposition: negative a_d or a_r radicand on supp a; increase F or M");
    }
    const auto terms = ev.terms.as_array();
    double rhs = 0.0;
    for (int i = 0; i < BTerms::kCount; ++i) {
      const double t = terms[static_cast<std::size_t>(i)];
      out.max_term[static_cast<std::size_t>(i)] =
          std::max(out.max_term[static_cast<std::size_t>(i)], std::abs(t));
      if (!(disabled_terms & (1u << i))) rhs += t;
    }
    out.max_residual = std::max(out.max_residual, std::abs(ev.lhs - rhs));
    out.max_lhs = std::max(out.max_lhs, std::abs(ev.lhs));
    ++out.points;
  }
  const BEvaluation at_gamma = evaluate_b_identity(mdl, prm, BPoint{1.0, 0.0, 0.0, 0.0, 0.0}, ovr);
  out.a_r_at_gamma = at_gamma.a_r_unweighted;
  return out;
}

/// Unweighted decomposition (r = 0); requires M above the parabolic threshold.
inline BVerification verify_b_decomposition(const BStructuralModel& mdl, BCommutantParams prm,
                                            const BGrid& grid) {
  prm.r = 0.0;
  const ParabolicBox box{grid.u_max, grid.tau_max, grid.v_max, 101};
  if (prm.M < parabolic_check(mdl, prm.M, box).M_threshold)
    throw std::domain_error("verify_b_decomposition: M below the parabolic threshold");
  return verify_b_identity(mdl, prm, grid);
}

/// Weighted variant with tau^{-r}; r < 0 for the forward orientation and
/// r > 0 for the reversed one.  a_r must be elliptic at the trapped set.
inline BVerification verify_b_weighted(const BStructuralModel& mdl, const BCommutantParams& prm,
                                       const BGrid& grid) {
  if (prm.r == 0.0) return verify_b_decomposition(mdl, prm, grid);
  const BVerification out = verify_b_identity(mdl, prm, grid);
  if (!(out.a_r_at_gamma > 0.0))
    throw std::domain_error("verify_b_weighted: a_r is not elliptic at the trapped set");
  return out;
}

/// Coefficients of the b-Hamilton field of a(tau, x, sigma, xi):
/// (d_sigma a) tau d_tau - (tau d_tau a) d_sigma + (d_xi a) d_x - (d_x a) d_xi.
struct BHamiltonField {
  double tau_d_tau = 0.0;
  double d_sigma = 0.0;
  double d_x = 0.0;
  double d_xi = 0.0;
};

/// Finite-difference version with steps scaled to the coordinates.
inline BHamiltonField b_hamilton(
    const std::function<double(double tau, double x, double sigma, double xi)>& a,
    double tau, double x, double sigma, double xi) {
  auto step = [](double c) { return 1e-5 * std::max(1.0, std::abs(c)); };
  auto d = [&](int i) {
    double p[4] = {tau, x, sigma, xi};
    double q[4] = {tau, x, sigma, xi};
    const double hstep = step(p[i]);
    p[i] += hstep;
    q[i] -= hstep;
    return (a(p[0], p[1], p[2], p[3]) - a(q[0], q[1], q[2], q[3])) / (2.0 * hstep);
  };
  const double da_tau = d(0), da_x = d(1), da_sigma = d(2), da_xi = d(3);
  return {da_sigma, -tau * da_tau, da_xi, -da_x};
}

}  // namespace nhtrap
