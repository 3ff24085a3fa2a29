#pragma once
// Discrete Weyl quantization on the periodic position grid.
//
// For nodes j, l with minimal-image offset d = wrap(j - l) in [-n/2, n/2),
//   Op(a)_{jl} = (1/n) sum_k exp(2 pi i d k / n) a(m_{jl}, xi_k),
// where the midpoint m_{jl} = x_l + d dx / 2 lives on the 2n-point periodic
// half grid.  The Nyquist offset d = -n/2 has two equally valid midpoints and
// takes their average.  This is exact for symbols of degree <= 2 in xi and
// reproduces Op(1) = I, multiplication operators and spectral derivatives.

#include "nhtrap/symbol.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <bit>
#include <complex>
#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace nhtrap {

using cdouble = std::complex<double>;

struct OperatorMatrix {
  PhaseGrid grid;
  Eigen::MatrixXcd entries;
  std::string label;

  Eigen::Index dim() const { return entries.rows(); }
};

enum class SupportCheck { kEnforce, kSkip };

namespace detail {

// Fraction of momentum nodes at each end treated as the aliasing band.
inline constexpr double kBoundaryBand = 0.05;
inline constexpr double kSupportTolerance = 1e-12;

inline void check_momentum_support(const Eigen::MatrixXd& half_grid_values, const PhaseGrid& g,
                                   const std::string& label) {
  const Eigen::Index n = g.n_x();
  const Eigen::Index band = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(kBoundaryBand * n));
  const double scale = std::max(1.0, half_grid_values.cwiseAbs().maxCoeff());
  const double edge = std::max(half_grid_values.leftCols(band).cwiseAbs().maxCoeff(),
                               half_grid_values.rightCols(band).cwiseAbs().maxCoeff());
  if (edge > kSupportTolerance * scale) {
    throw std::domain_error("weyl_quantize: symbol '" + label +
                            "' does not vanish near the momentum boundary; increase xi_max");
  }
}

// Symbol values on the 2n half-grid midpoints, (s, k) layout.
inline Eigen::MatrixXd half_grid_values(const SymbolField& a) {
  const PhaseGrid& g = a.grid();
  const Eigen::Index n = g.n_x();
  Eigen::MatrixXd out(2 * n, n);
  if (a.has_closed_form()) {
    const ClosedForm& f = *a.closed_form();
    const double half = 0.5 * g.dx();
    for (Eigen::Index k = 0; k < n; ++k) {
      const double xi = g.xi(k);
      for (Eigen::Index s = 0; s < 2 * n; ++s) {
        // Even s are grid nodes; reuse the sampled value so both paths agree.
        out(s, k) = (s % 2 == 0) ? a(s / 2, k) : f(g.x_min() + static_cast<double>(s) * half, xi);
      }
    }
  } else {
    // Periodic four-point cubic interpolation for the odd midpoints.
    const Eigen::MatrixXd& v = a.values();
    auto wrap = [n](Eigen::Index j) { return ((j % n) + n) % n; };
    for (Eigen::Index k = 0; k < n; ++k) {
      for (Eigen::Index j = 0; j < n; ++j) {
        out(2 * j, k) = v(j, k);
        out(2 * j + 1, k) = (-v(wrap(j - 1), k) + 9.0 * v(j, k) + 9.0 * v(wrap(j + 1), k) -
                             v(wrap(j + 2), k)) / 16.0;
      }
    }
  }
  return out;
}

}  // namespace detail

inline OperatorMatrix weyl_quantize(const SymbolField& a, SupportCheck check = SupportCheck::kEnforce,
                                    std::string label = "symbol") {
  const PhaseGrid& g = a.grid();
  const Eigen::Index n = g.n_x();
  const Eigen::MatrixXd A = detail::half_grid_values(a);
  if (check == SupportCheck::kEnforce) detail::check_momentum_support(A, g, label);

  // F(s, d mod n) = (1/n) sum_k e^{2 pi i d k/n} A(s, k) with k signed.  Column
  // k of A holds signed index k - n/2, hence the (-1)^d modulation.
  Eigen::MatrixXcd F(2 * n, n);
  {
    Eigen::FFT<double> fft;
    std::vector<cdouble> in(static_cast<std::size_t>(n));
    std::vector<cdouble> out(static_cast<std::size_t>(n));
    for (Eigen::Index s = 0; s < 2 * n; ++s) {
      for (Eigen::Index k = 0; k < n; ++k) in[static_cast<std::size_t>(k)] = A(s, k);
      fft.inv(out, in);
      for (Eigen::Index d = 0; d < n; ++d) {
        const double sign = (d % 2 == 0) ? 1.0 : -1.0;
        F(s, d) = sign * out[static_cast<std::size_t>(d)];
      }
    }
  }

  Eigen::MatrixXcd M(n, n);
  const Eigen::Index two_n = 2 * n;
  for (Eigen::Index l = 0; l < n; ++l) {
    for (Eigen::Index j = l; j < n; ++j) {
      const Eigen::Index d = ((j - l + n / 2) % n) - n / 2;
      const Eigen::Index dcol = ((d % n) + n) % n;
      cdouble value;
      if (d == -n / 2) {
        const Eigen::Index s1 = ((2 * l - n / 2) % two_n + two_n) % two_n;
        const Eigen::Index s2 = (2 * l + n / 2) % two_n;
        value = 0.5 * (F(s1, dcol) + F(s2, dcol));
        value = cdouble(value.real(), 0.0);  // real for real symbols
      } else {
        const Eigen::Index s = ((2 * l + d) % two_n + two_n) % two_n;
        value = F(s, dcol);
      }
      if (j == l) value = cdouble(value.real(), 0.0);
      M(j, l) = value;
      M(l, j) = std::conj(value);
    }
  }
  return OperatorMatrix{g, std::move(M), std::move(label)};
}

inline OperatorMatrix weyl_quantize(const ClosedForm& a, const PhaseGrid& g,
                                    SupportCheck check = SupportCheck::kEnforce,
                                    std::string label = "symbol") {
  return weyl_quantize(SymbolField::sample(g, a), check, std::move(label));
}

inline OperatorMatrix adjoint(const OperatorMatrix& A) {
  return OperatorMatrix{A.grid, A.entries.adjoint(), A.label + "*"};
}

inline OperatorMatrix commutator(const OperatorMatrix& A, const OperatorMatrix& B) {
  if (!(A.grid == B.grid)) throw std::invalid_argument("commutator: grid mismatch");
  Eigen::MatrixXcd C = A.entries * B.entries;
  C.noalias() -= B.entries * A.entries;
  return OperatorMatrix{A.grid, std::move(C), "[" + A.label + "," + B.label + "]"};
}

/// Relative Frobenius distance to Hermitian: ||A - A*||_F / ||A||_F.
inline double hermitian_defect(const Eigen::MatrixXcd& A) {
  const double norm = A.norm();
  return norm == 0.0 ? 0.0 : (A - A.adjoint()).norm() / norm;
}

static_assert(std::endian::native == std::endian::little,
              "matrix dumps assume a little-endian host");

/// Binary dump: uint64 dimension, then row-major (re, im) doubles.
inline void write_matrix_binary(std::ostream& os, const Eigen::MatrixXcd& M) {
  if (M.rows() != M.cols()) throw std::invalid_argument("write_matrix_binary: matrix not square");
  const auto dim = static_cast<std::uint64_t>(M.rows());
  os.write(reinterpret_cast<const char*>(&dim), sizeof dim);
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    for (Eigen::Index c = 0; c < M.cols(); ++c) {
      const double parts[2] = {M(r, c).real(), M(r, c).imag()};
      os.write(reinterpret_cast<const char*>(parts), sizeof parts);
    }
  }
  if (!os) throw std::runtime_error("write_matrix_binary: stream failure");
}

inline Eigen::MatrixXcd read_matrix_binary(std::istream& is) {
  std::uint64_t dim = 0;
  is.read(reinterpret_cast<char*>(&dim), sizeof dim);
  if (!is) throw std::runtime_error("read_matrix_binary: missing header");
  const auto n = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXcd M(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      double parts[2];
      is.read(reinterpret_cast<char*>(parts), sizeof parts);
      M(r, c) = cdouble(parts[0], parts[1]);
    }
  }
  if (!is) throw std::runtime_error("read_matrix_binary: truncated payload");
  return M;
}

}  // namespace nhtrap
