#pragma once
// Gram-matrix realization of the normally isotropic space at the trapped set:
//   ||u||^2 = ||Q0 u||^2 + ||Q+ u||^2 + ||Q- u||^2 + h ||u||^2 = <G u, u>,
// with the dual norm given by the G^{-1} quadratic form.

#include "nhtrap/model.hpp"
#include "nhtrap/quantize.hpp"
#include "nhtrap/smooth.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <optional>
#include <stdexcept>

namespace nhtrap {

struct FrameOptions {
  std::optional<ClosedForm> phi_plus;   // defaults to the model's defining functions
  std::optional<ClosedForm> phi_minus;
};

/// Radial plateau in (x, xi): 1 for r <= r_in, 0 for r >= r_out.
inline ClosedForm radial_plateau(double r_in, double r_out) {
  return ClosedForm([=](const auto& x, const auto& xi) {
    using T = std::decay_t<decltype(x)>;
    return T(smooth::step_down(T(x * x + xi * xi), r_in * r_in, r_out * r_out));
  });
}

/// Symbol of the away-from-trapping cutoff A = Q0 = I - Op(b): b is the
/// plateau that equals 1 within O_radius/3 and vanishes outside O.
inline ClosedForm trapping_plateau(const ModelSpec& model) {
  return radial_plateau(model.O_radius / 3.0, model.O_radius);
}

/// I - Op(trapping_plateau), the quantization of the real symbol 1 - b.
inline OperatorMatrix away_cutoff(const ModelSpec& model, const PhaseGrid& grid) {
  OperatorMatrix B = weyl_quantize(trapping_plateau(model), grid, SupportCheck::kEnforce, "b");
  B.entries = Eigen::MatrixXcd::Identity(grid.n_x(), grid.n_x()) - B.entries;
  B.label = "Q0";
  return B;
}

class NormFrame {
 public:
  NormFrame(OperatorMatrix Q0, OperatorMatrix Qp, OperatorMatrix Qm)
      : Q0_(std::move(Q0)), Qp_(std::move(Qp)), Qm_(std::move(Qm)) {
    const PhaseGrid& g = Q0_.grid;
    if (!(Qp_.grid == g && Qm_.grid == g)) throw std::invalid_argument("NormFrame: grid mismatch");
    h_ = g.h();
    const Eigen::Index n = g.n_x();
    Eigen::MatrixXcd G = Eigen::MatrixXcd::Identity(n, n) * h_;
    G.noalias() += Q0_.entries.adjoint() * Q0_.entries;
    G.noalias() += Qp_.entries.adjoint() * Qp_.entries;
    G.noalias() += Qm_.entries.adjoint() * Qm_.entries;
    // Symmetrize so the eigensolver sees an exactly Hermitian matrix.
    G = (0.5 * (G + G.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(G);
    if (eig.info() != Eigen::Success) throw std::runtime_error("NormFrame: eigensolver failed");
    evals_ = eig.eigenvalues();
    evecs_ = eig.eigenvectors();
    G_ = std::move(G);
    const Eigen::VectorXd root = evals_.cwiseMax(0.0).cwiseSqrt();
    sqrtG_ = evecs_ * root.asDiagonal() * evecs_.adjoint();
  }

  double h() const { return h_; }
  const PhaseGrid& grid() const { return Q0_.grid; }
  const OperatorMatrix& Q0() const { return Q0_; }
  const OperatorMatrix& Qp() const { return Qp_; }
  const OperatorMatrix& Qm() const { return Qm_; }
  const Eigen::MatrixXcd& G() const { return G_; }
  const Eigen::MatrixXcd& sqrtG() const { return sqrtG_; }
  const Eigen::VectorXd& eigenvalues() const { return evals_; }

  double condition_number() const { return evals_(evals_.size() - 1) / evals_(0); }

  /// G^{-1} f through the stored eigendecomposition.
  Eigen::VectorXcd solve(const Eigen::VectorXcd& f) const {
    check_dim(f);
    const Eigen::VectorXcd c = evecs_.adjoint() * f;
    return evecs_ * c.cwiseQuotient(evals_.cast<cdouble>());
  }

  double norm_iso(const Eigen::VectorXcd& u) const {
    check_dim(u);
    return std::sqrt(std::max(0.0, u.dot(G_ * u).real()));
  }

  double norm_iso_dual(const Eigen::VectorXcd& f) const {
    return std::sqrt(std::max(0.0, f.dot(solve(f)).real()));
  }

 private:
  void check_dim(const Eigen::VectorXcd& v) const {
    if (v.size() != G_.rows()) throw std::invalid_argument("NormFrame: dimension mismatch");
  }

  OperatorMatrix Q0_;
  OperatorMatrix Qp_;
  OperatorMatrix Qm_;
  Eigen::MatrixXcd G_;
  Eigen::MatrixXcd sqrtG_;
  Eigen::VectorXd evals_;
  Eigen::MatrixXcd evecs_;
  double h_ = 0.0;
};

/// Minimum number of position nodes across the inner radius O_radius/3.
inline constexpr double kMinNodesAcrossCore = 8.0;

inline NormFrame build_frame(const ModelSpec& model, const PhaseGrid& grid,
                             const FrameOptions& opts = {}) {
  if (model.O_radius / 3.0 / grid.dx() < kMinNodesAcrossCore)
    throw std::invalid_argument("build_frame: grid too coarse to resolve the O_radius/3 core");
  // chi_O = 1 on {r <= 2 O_radius} (covering O), 0 on {r >= 3 O_radius}.
  const ClosedForm chi_O = radial_plateau(2.0 * model.O_radius, 3.0 * model.O_radius);
  auto cut_off = [&chi_O](const ClosedForm& phi) {
    return ClosedForm([=](const auto& x, const auto& xi) {
      using T = std::decay_t<decltype(x)>;
      return T(phi(x, xi) * chi_O(x, xi));
    });
  };
  const ClosedForm php = opts.phi_plus.value_or(model.phi_plus);
  const ClosedForm phm = opts.phi_minus.value_or(model.phi_minus);
  OperatorMatrix Qp = weyl_quantize(cut_off(php), grid, SupportCheck::kEnforce, "Q+");
  OperatorMatrix Qm = weyl_quantize(cut_off(phm), grid, SupportCheck::kEnforce, "Q-");
  return NormFrame(away_cutoff(model, grid), std::move(Qp), std::move(Qm));
}

struct NormEquivalence {
  double c_lower = 0.0;  // min over u of (||u||^2 - h||u||^2) / ||u||^2_iso
  double C_upper = 0.0;  // max of the same ratio (bounded by 1)
};

/// Extreme generalized eigenvalues of (G - hI, G): 1 - h / lambda(G).
inline NormEquivalence check_norm_equivalence(const NormFrame& frame) {
  const Eigen::VectorXd& ev = frame.eigenvalues();
  return {1.0 - frame.h() / ev(0), 1.0 - frame.h() / ev(ev.size() - 1)};
}

}  // namespace nhtrap
