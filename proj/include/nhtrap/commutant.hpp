#pragma once
// Escape-function commutant localized at the trapped set and its exact
// sum-of-squares decomposition along the Hamilton flow.

#include "nhtrap/linalg.hpp"
#include "nhtrap/model.hpp"
#include "nhtrap/quantize.hpp"
#include "nhtrap/smooth.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

namespace nhtrap {

/// chi0(t) = e^{-F/t}; chi = 1 on [0, R0], 0 on [R, inf), chi' chi = -chi1^2;
/// psi even, 1 on [-w/2, w/2], 0 outside [-w, w].
class CutoffFamily {
 public:
  CutoffFamily(double kappa, double R, double F, double psi_width, double R0)
      : kappa_(kappa), R_(R), F_(F), psi_width_(psi_width), R0_(R0) {
    if (!(kappa > 0.0 && R > 0.0 && F > 0.0 && psi_width > 0.0))
      throw std::invalid_argument("build_cutoffs: kappa, R, F and psi_width must be positive");
    if (!(R0 > 0.0 && R0 < R)) throw std::invalid_argument("build_cutoffs: need 0 < R0 < R");
  }

  double kappa() const { return kappa_; }
  double R() const { return R_; }
  double F() const { return F_; }
  double psi_width() const { return psi_width_; }
  double R0() const { return R0_; }

  template <typename T> T chi0(const T& t) const { return smooth::chi0(t, F_); }
  template <typename T> T chi0_prime(const T& t) const { return smooth::chi0_prime(t, F_); }
  template <typename T> T sqrt_chi0_chi0_prime(const T& t) const {
    return smooth::sqrt_chi0_chi0_prime(t, F_);
  }
  template <typename T> T chi(const T& t) const { return smooth::step_down(t, R0_, R_); }
  template <typename T> T chi1(const T& t) const { return smooth::step_down_root(t, R0_, R_); }
  template <typename T> T psi(const T& t) const {
    return smooth::even_bump(t, 0.5 * psi_width_, psi_width_);
  }

 private:
  double kappa_;
  double R_;
  double F_;
  double psi_width_;
  double R0_;
};

inline CutoffFamily build_cutoffs(double kappa, double R, double F, double psi_width) {
  return CutoffFamily(kappa, R, F, psi_width, 0.5 * R);
}

struct CommutantSet {
  ClosedForm a;
  ClosedForm a_plus;
  ClosedForm a_minus;
  ClosedForm e_minus;
  CutoffFamily params;
};

namespace detail {

// Largest |a| on the annulus O_radius <= r <= 3 O_radius (polar samples).
inline double max_outside_O(const ClosedForm& a, double O_radius) {
  double worst = 0.0;
  constexpr int kRadii = 64;
  constexpr int kAngles = 512;
  for (int i = 0; i <= kRadii; ++i) {
    const double r = O_radius * (1.0 + 2.0 * i / kRadii);
    for (int t = 0; t < kAngles; ++t) {
      const double th = 2.0 * std::numbers::pi * t / kAngles;
      worst = std::max(worst, std::abs(a(r * std::cos(th), r * std::sin(th))));
    }
  }
  return worst;
}

}  // namespace detail

inline CommutantSet build_commutant(const ModelSpec& model, const CutoffFamily& cut) {
  const ClosedForm fp = model.phi_plus;
  const ClosedForm fm = model.phi_minus;
  const ClosedForm p = model.p;
  const double kappa = cut.kappa();
  const double c_plus = std::sqrt(model.c_plus_sq);

  ClosedForm a([=](const auto& x, const auto& xi) {
    using T = std::decay_t<decltype(x)>;
    const T up = fp(x, xi);
    const T um = fm(x, xi);
    const T up2 = up * up;
    return T(cut.chi0(T(up2 - um * um + kappa)) * cut.chi(up2) * cut.psi(p(x, xi)));
  });
  // Common factor sqrt(chi0 chi0')(Phi) chi(phi_+^2) psi(p).
  auto root = [=](const auto& x, const auto& xi) {
    using T = std::decay_t<decltype(x)>;
    const T up = fp(x, xi);
    const T um = fm(x, xi);
    const T up2 = up * up;
    return T(cut.sqrt_chi0_chi0_prime(T(up2 - um * um + kappa)) * cut.chi(up2) *
             cut.psi(p(x, xi)));
  };
  ClosedForm a_plus([=](const auto& x, const auto& xi) {
    using T = std::decay_t<decltype(x)>;
    return T(fp(x, xi) * root(x, xi));
  });
  ClosedForm a_minus([=](const auto& x, const auto& xi) {
    using T = std::decay_t<decltype(x)>;
    return T(fm(x, xi) * root(x, xi));
  });
  ClosedForm e_minus([=](const auto& x, const auto& xi) {
    using T = std::decay_t<decltype(x)>;
    const T up = fp(x, xi);
    const T um = fm(x, xi);
    const T up2 = up * up;
    return T(c_plus * up * cut.chi1(up2) * cut.chi0(T(up2 - um * um + kappa)) *
             cut.psi(p(x, xi)));
  });

  if (detail::max_outside_O(a, model.O_radius) > 0.0)
    throw std::invalid_argument("build_commutant: cutoff support leaks outside O");
  return CommutantSet{std::move(a), std::move(a_plus), std::move(a_minus), std::move(e_minus), cut};
}

/// Weyl correction symbols for a subprincipal part p1, sampled on `grid`:
/// g_pm = +-1/2 (H_{p1} phi_pm) sqrt(chi0 chi0')(Phi) chi(phi_+^2) psi(p).
inline std::pair<SymbolField, SymbolField> build_weyl_corrections(const CommutantSet& cs,
                                                                  const ModelSpec& model,
                                                                  const ClosedForm& p1,
                                                                  const PhaseGrid& grid) {
  const CutoffFamily& cut = cs.params;
  const Eigen::Index n = grid.n_x();
  Eigen::MatrixXd gp(n, n);
  Eigen::MatrixXd gm(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double x = grid.x(j);
      const double xi = grid.xi(k);
      const SymbolGradient g1 = p1.gradient(x, xi);
      const SymbolGradient fp = model.phi_plus.gradient(x, xi);
      const SymbolGradient fm = model.phi_minus.gradient(x, xi);
      const double up2 = fp.value * fp.value;
      const double common = cut.sqrt_chi0_chi0_prime(up2 - fm.value * fm.value + cut.kappa()) *
                            cut.chi(up2) * cut.psi(model.p(x, xi));
      gp(j, k) = 0.5 * (g1.dxi * fp.dx - g1.dx * fp.dxi) * common;
      gm(j, k) = -0.5 * (g1.dxi * fm.dx - g1.dx * fm.dxi) * common;
    }
  }
  return {SymbolField(grid, std::move(gp)), SymbolField(grid, std::move(gm))};
}

struct DecompositionOptions {
  std::optional<double> c_plus_sq_rhs;   // override on the right side only
  std::optional<double> c_minus_sq_rhs;
};

struct DecompositionResult {
  SymbolField residual;
  double max_abs = 0.0;
  double max_lhs = 0.0;
};

/// Pointwise 1/4 H_p(a^2) - (-c+^2 a+^2 - c-^2 a-^2 + e-^2).  The left side
/// is differentiated exactly by forward-mode jets through p and a.
inline DecompositionResult verify_decomposition(const CommutantSet& cs, const ModelSpec& model,
                                                const PhaseGrid& grid,
                                                const DecompositionOptions& opts = {}) {
  const double cp2 = opts.c_plus_sq_rhs.value_or(model.c_plus_sq);
  const double cm2 = opts.c_minus_sq_rhs.value_or(model.c_minus_sq);
  const Eigen::Index n = grid.n_x();
  Eigen::MatrixXd res(n, n);
  double max_lhs = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double x = grid.x(j);
      const double xi = grid.xi(k);
      const SymbolGradient ga = cs.a.gradient(x, xi);
      double lhs = 0.0;
      if (ga.value != 0.0 || ga.dx != 0.0 || ga.dxi != 0.0) {
        const SymbolGradient gp = model.p.gradient(x, xi);
        lhs = 0.5 * ga.value * (gp.dxi * ga.dx - gp.dx * ga.dxi);
      }
      const double ap = cs.a_plus(x, xi);
      const double am = cs.a_minus(x, xi);
      const double em = cs.e_minus(x, xi);
      res(j, k) = lhs - (-cp2 * ap * ap - cm2 * am * am + em * em);
      max_lhs = std::max(max_lhs, std::abs(lhs));
    }
  }
  const double max_abs = res.cwiseAbs().maxCoeff();
  return {SymbolField(grid, std::move(res)), max_abs, max_lhs};
}

struct OperatorCommutatorReport {
  double h = 0.0;
  Eigen::Index n_x = 0;
  double norm_D = 0.0;
  double norm_D_over_h = 0.0;
  double off_support_max = 0.0;  // max ||D v|| / ||v|| over off-support probes
  bool passed = false;
};

/// Smooth unit-norm bump exp(-(x - center)^2 / (2 width^2)) on the grid.
inline Eigen::VectorXcd position_bump(const PhaseGrid& g, double center, double width,
                                      double momentum = 0.0) {
  Eigen::VectorXcd v(g.n_x());
  for (Eigen::Index j = 0; j < g.n_x(); ++j) {
    const double y = (g.x(j) - center) / width;
    v(j) = std::exp(-0.5 * y * y) * std::polar(1.0, momentum * g.x(j) / g.h());
  }
  return v / v.norm();
}

/// D = (i/4h)[P, A*A] + c+^2 A+*A+ + c-^2 A-*A- - E-*E-, with P = Op(p).
inline OperatorCommutatorReport verify_operator_commutator(const ModelSpec& model,
                                                           const CutoffFamily& cut,
                                                           const PhaseGrid& grid, double tol) {
  const CommutantSet cs = build_commutant(model, cut);
  const Eigen::MatrixXcd P = weyl_quantize(model.p, grid, SupportCheck::kSkip, "p").entries;
  const Eigen::MatrixXcd A = weyl_quantize(cs.a, grid, SupportCheck::kEnforce, "a").entries;
  const Eigen::MatrixXcd Ap = weyl_quantize(cs.a_plus, grid, SupportCheck::kEnforce, "a+").entries;
  const Eigen::MatrixXcd Am = weyl_quantize(cs.a_minus, grid, SupportCheck::kEnforce, "a-").entries;
  const Eigen::MatrixXcd Em = weyl_quantize(cs.e_minus, grid, SupportCheck::kEnforce, "e-").entries;
  const double h = grid.h();

  const Eigen::MatrixXcd AA = A.adjoint() * A;
  Eigen::MatrixXcd D = P * AA;
  D.noalias() -= AA * P;
  D *= cdouble(0.0, 1.0 / (4.0 * h));
  D.noalias() += model.c_plus_sq * (Ap.adjoint() * Ap);
  D.noalias() += model.c_minus_sq * (Am.adjoint() * Am);
  D.noalias() -= Em.adjoint() * Em;

  OperatorCommutatorReport rep;
  rep.h = h;
  rep.n_x = grid.n_x();
  rep.norm_D = op_norm(D).value;
  rep.norm_D_over_h = rep.norm_D / h;
  for (double center : {-6.0, -5.0, 5.0, 6.0}) {
    const Eigen::VectorXcd v = position_bump(grid, center, 0.3);
    rep.off_support_max = std::max(rep.off_support_max, (D * v).norm());
  }
  rep.passed = rep.norm_D_over_h <= tol;
  return rep;
}

}  // namespace nhtrap
