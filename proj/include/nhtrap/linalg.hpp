#pragma once
// Largest singular value of an implicitly given operator.
//
// Lanczos on A*A with full reorthogonalization.  The resolvent operators of
// interest have near-degenerate top singular values (relative gaps below
// 1e-3), where plain power iteration stalls; Krylov extraction does not.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

namespace nhtrap {

struct LinearMap {
  Eigen::Index dim = 0;
  std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)> apply;
  std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)> apply_adjoint;

  static LinearMap from_matrix(const Eigen::MatrixXcd& M) {
    if (M.rows() != M.cols()) throw std::invalid_argument("LinearMap: matrix must be square");
    return {M.rows(), [&M](const Eigen::VectorXcd& v) { return Eigen::VectorXcd(M * v); },
            [&M](const Eigen::VectorXcd& v) { return Eigen::VectorXcd(M.adjoint() * v); }};
  }
};

struct NormEstimate {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct OpNormOptions {
  double tol = 1e-10;
  int max_iter = 400;
  std::uint64_t seed = 12345;
};

/// Deterministic complex Gaussian vector with unit norm.
inline Eigen::VectorXcd seeded_unit_vector(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    v(i) = {re, im};
  }
  return v / v.norm();
}

inline NormEstimate op_norm(const LinearMap& A, const OpNormOptions& opts = {}) {
  if (!(opts.tol > 0.0)) throw std::invalid_argument("op_norm: tol must be positive");
  const Eigen::Index n = A.dim;
  if (n == 0) return {0.0, 0, true};
  const int max_iter = static_cast<int>(std::min<Eigen::Index>(opts.max_iter, n));

  std::vector<Eigen::VectorXcd> basis;
  std::vector<double> alpha;
  std::vector<double> beta;
  basis.push_back(seeded_unit_vector(n, opts.seed));

  NormEstimate est;
  for (int k = 0; k < max_iter; ++k) {
    Eigen::VectorXcd w = A.apply_adjoint(A.apply(basis.back()));
    if (k > 0) w -= beta.back() * basis[basis.size() - 2];
    const double a = basis.back().dot(w).real();
    alpha.push_back(a);
    w -= a * basis.back();
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis) w -= q.dot(w) * q;
    const double b = w.norm();

    const auto m = static_cast<Eigen::Index>(alpha.size());
    Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), m);
    Eigen::VectorXd sub = Eigen::VectorXd::Zero(std::max<Eigen::Index>(m - 1, 0));
    for (Eigen::Index i = 0; i + 1 < m; ++i) sub(i) = beta[static_cast<std::size_t>(i)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const double theta = std::max(tri.eigenvalues()(m - 1), 0.0);
    const double residual = b * std::abs(tri.eigenvectors()(m - 1, m - 1));

    est.value = std::sqrt(theta);
    est.iterations = k + 1;
    if (residual <= opts.tol * theta || b <= 1e-14 * std::max(theta, 1e-300)) {
      est.converged = true;
      break;
    }
    beta.push_back(b);
    basis.push_back(w / b);
  }
  if (!est.converged && est.iterations == n) est.converged = true;  // full Krylov space
  return est;
}

inline NormEstimate op_norm(const Eigen::MatrixXcd& M, const OpNormOptions& opts = {}) {
  return op_norm(LinearMap::from_matrix(M), opts);
}

}  // namespace nhtrap
