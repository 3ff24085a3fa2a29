#pragma once
// P_h(z) = Op(p) - i Op(w) - z with complex absorption, and resolvent norms
// in L^2, in the normally isotropic spaces, and sandwiched by a cutoff away
// from the trapped set.

#include "nhtrap/linalg.hpp"
#include "nhtrap/model.hpp"
#include "nhtrap/quantize.hpp"
#include "nhtrap/spaces.hpp"

#include <Eigen/LU>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace nhtrap {

inline OperatorMatrix assemble(const ModelSpec& model, const PhaseGrid& grid, cdouble z,
                               double im_z_coeff = 1.0) {
  const double h = grid.h();
  if (std::abs(z.imag()) > im_z_coeff * h * h)
    throw std::invalid_argument("assemble: |Im z| exceeds c*h^2");
  OperatorMatrix P = weyl_quantize(model.p, grid, SupportCheck::kSkip, "p");
  const OperatorMatrix W = weyl_quantize(model.absorb.as_symbol(), grid, SupportCheck::kSkip, "w");
  P.entries -= cdouble(0.0, 1.0) * W.entries;
  P.entries.diagonal().array() -= z;
  P.label = "P(z)";
  return P;
}

/// P together with one LU factorization, shared by every solve.
class Resolvent {
 public:
  Resolvent(const ModelSpec& model, const PhaseGrid& grid, cdouble z, double im_z_coeff = 1.0)
      : P_(assemble(model, grid, z, im_z_coeff)), lu_(P_.entries) {}

  const OperatorMatrix& P() const { return P_; }
  const PhaseGrid& grid() const { return P_.grid; }
  Eigen::VectorXcd solve(const Eigen::VectorXcd& f) const { return lu_.solve(f); }
  Eigen::VectorXcd solve_adjoint(const Eigen::VectorXcd& f) const {
    return lu_.adjoint().solve(f);
  }

 private:
  OperatorMatrix P_;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
};

struct ScalingRecord {
  double h = 0.0;
  Eigen::Index n_x = 0;
  double norm_l2 = 0.0;
  double norm_iso = 0.0;
  double norm_sandwich = 0.0;
  double wall_time = 0.0;
  bool converged = true;  // every norm estimate converged
};

struct NormOptions {
  double tol = 1e-8;
  int max_iter = 400;
  std::uint64_t seed = 12345;
};

inline ScalingRecord resolvent_norms(const Resolvent& R, const NormFrame& frame,
                                     const NormOptions& opts = {}) {
  const auto start = std::chrono::steady_clock::now();
  const Eigen::Index n = R.grid().n_x();
  const OpNormOptions lanczos{opts.tol, opts.max_iter, opts.seed};
  const Eigen::MatrixXcd& S = frame.sqrtG();
  const Eigen::MatrixXcd& A = frame.Q0().entries;

  const NormEstimate l2 = op_norm(
      LinearMap{n, [&](const Eigen::VectorXcd& v) { return R.solve(v); },
                [&](const Eigen::VectorXcd& v) { return R.solve_adjoint(v); }},
      lanczos);
  const NormEstimate iso = op_norm(
      LinearMap{n, [&](const Eigen::VectorXcd& v) { return Eigen::VectorXcd(S * R.solve(S * v)); },
                [&](const Eigen::VectorXcd& v) {
                  return Eigen::VectorXcd(S * R.solve_adjoint(S * v));
                }},
      lanczos);
  const NormEstimate sw = op_norm(
      LinearMap{n, [&](const Eigen::VectorXcd& v) { return Eigen::VectorXcd(A * R.solve(A * v)); },
                [&](const Eigen::VectorXcd& v) {
                  return Eigen::VectorXcd(A.adjoint() * R.solve_adjoint(A.adjoint() * v));
                }},
      lanczos);

  ScalingRecord rec;
  rec.h = R.grid().h();
  rec.n_x = n;
  rec.norm_l2 = l2.value;
  rec.norm_iso = iso.value;
  rec.norm_sandwich = sw.value;
  rec.converged = l2.converged && iso.converged && sw.converged;
  rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

struct SampleStatistics {
  double weak_max = 0.0;   // (||Q+u|| + ||Q-u||) / (h^-1 ||Pu||_dual + h^1/2 ||u||)
  double weak_mean = 0.0;
  double iso_max = 0.0;    // ||u||_iso / (h^-1 ||f||_dual)
  double iso_mean = 0.0;
};

inline SampleStatistics check_theorem1_samples(const Resolvent& R, const NormFrame& frame,
                                               int n_samples, std::uint64_t seed) {
  if (n_samples <= 0) throw std::invalid_argument("check_theorem1_samples: need samples");
  const double h = frame.h();
  const Eigen::Index n = R.grid().n_x();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  SampleStatistics st;
  for (int i = 0; i < n_samples; ++i) {
    Eigen::VectorXcd f(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double re = normal(rng);
      const double im = normal(rng);
      f(j) = {re, im};
    }
    const Eigen::VectorXcd u = R.solve(f);
    const Eigen::VectorXcd Pu = R.P().entries * u;
    const double weak = ((frame.Qp().entries * u).norm() + (frame.Qm().entries * u).norm()) /
                        (frame.norm_iso_dual(Pu) / h + std::sqrt(h) * u.norm());
    const double iso = frame.norm_iso(u) / (frame.norm_iso_dual(f) / h);
    st.weak_max = std::max(st.weak_max, weak);
    st.iso_max = std::max(st.iso_max, iso);
    st.weak_mean += weak / n_samples;
    st.iso_mean += iso / n_samples;
  }
  return st;
}

}  // namespace nhtrap
