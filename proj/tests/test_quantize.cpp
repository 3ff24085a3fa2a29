#include "nhtrap/linalg.hpp"
#include "nhtrap/model.hpp"
#include "nhtrap/quantize.hpp"
#include "nhtrap/smooth.hpp"

#include <gtest/gtest.h>

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <sstream>

using namespace nhtrap;

namespace {

const cdouble kI(0.0, 1.0);

// 1 on |x| <= 5, 0 beyond 7: keeps polynomial symbols away from the box edge.
template <typename T>
T box_cut(const T& x) {
  return smooth::even_bump(x, 5.0, 7.0);
}

ClosedForm xi_cut() {
  return ClosedForm([](const auto& x, const auto& xi) {
    using T = std::decay_t<decltype(x)>;
    return T(xi * box_cut(T(x)));
  });
}

ClosedForm x_cut() {
  return ClosedForm([](const auto& x, const auto&) {
    using T = std::decay_t<decltype(x)>;
    return T(x * box_cut(T(x)));
  });
}

Eigen::VectorXcd gaussian(const PhaseGrid& g, double x0, double xi0, double width) {
  Eigen::VectorXcd v(g.n_x());
  for (Eigen::Index j = 0; j < g.n_x(); ++j) {
    const double x = g.x(j);
    v(j) = std::exp(-(x - x0) * (x - x0) / (2.0 * width * width)) * std::exp(kI * xi0 * x / g.h());
  }
  return v / v.norm();
}

// h D_x through the FFT: multiply by the momentum of each Fourier mode.
Eigen::VectorXcd spectral_hd(const PhaseGrid& g, const Eigen::VectorXcd& v) {
  const Eigen::Index n = g.n_x();
  Eigen::FFT<double> fft;
  std::vector<cdouble> in(v.data(), v.data() + n), spec, out;
  fft.fwd(spec, in);
  for (Eigen::Index m = 0; m < n; ++m) {
    const Eigen::Index signed_m = m < n / 2 ? m : m - n;
    spec[static_cast<std::size_t>(m)] *= (m == n / 2) ? 0.0 : static_cast<double>(signed_m) * g.dxi();
  }
  fft.inv(out, spec);
  return Eigen::Map<Eigen::VectorXcd>(out.data(), n);
}

// Residual norm over rows with |x| <= 4.  The periodic box couples a row to
// points about one box length away through the edge cutoff, so edge rows are
// excluded from identity checks.
double interior_norm(const PhaseGrid& g, const Eigen::VectorXcd& r) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < g.n_x(); ++j)
    if (std::abs(g.x(j)) <= 4.0) s += std::norm(r(j));
  return std::sqrt(s);
}

}  // namespace

TEST(Quantize, ConstantOneIsIdentity) {
  const PhaseGrid g = make_grid(0.1, -8, 8, 4, 128);
  const ClosedForm one([](const auto& x, const auto&) {
    using T = std::decay_t<decltype(x)>;
    return T(1.0);
  });
  const auto A = weyl_quantize(one, g, SupportCheck::kSkip);
  EXPECT_LE((A.entries - Eigen::MatrixXcd::Identity(g.n_x(), g.n_x())).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Quantize, PositionSymbolIsDiagonal) {
  const PhaseGrid g = make_grid(0.1, -8, 8, 4, 128);
  const ClosedForm f([](const auto& x, const auto&) {
    using std::exp;
    using T = std::decay_t<decltype(x)>;
    return T(exp(T(-x * x)) * (1.0 + x));
  });
  const auto A = weyl_quantize(f, g, SupportCheck::kSkip);
  Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(g.n_x(), g.n_x());
  for (Eigen::Index j = 0; j < g.n_x(); ++j) D(j, j) = f(g.x(j), 0.0);
  EXPECT_LE((A.entries - D).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Quantize, MomentumSymbolIsSpectralDerivative) {
  const PhaseGrid g = make_grid(0.1, -8, 8, 4, 256);
  const auto A = weyl_quantize(xi_cut(), g, SupportCheck::kSkip);
  for (double x0 : {-1.0, 0.0, 1.0}) {
    const Eigen::VectorXcd v = gaussian(g, x0, 0.7, 0.25);
    const Eigen::VectorXcd diff = A.entries * v - spectral_hd(g, v);
    double worst = 0.0;
    for (Eigen::Index j = 0; j < g.n_x(); ++j)
      if (std::abs(g.x(j)) <= 4.0) worst = std::max(worst, std::abs(diff(j)));
    EXPECT_LE(worst, 1e-8) << "x0 = " << x0;
  }
}

TEST(Quantize, CanonicalCommutator) {
  const PhaseGrid g = make_grid(0.1, -8, 8, 4, 256);
  const auto C = commutator(weyl_quantize(xi_cut(), g, SupportCheck::kSkip),
                            weyl_quantize(x_cut(), g, SupportCheck::kSkip));
  for (double x0 : {-1.0, 0.5}) {
    const Eigen::VectorXcd v = gaussian(g, x0, -0.4, 0.25);
    EXPECT_LE(interior_norm(g, C.entries * v - (g.h() / kI) * v), 1e-8);
  }
}

TEST(Quantize, SelfCommutatorVanishes) {
  const PhaseGrid g = make_grid(0.2, -8, 8, 4, 64);
  const auto A = weyl_quantize(xi_cut(), g, SupportCheck::kSkip);
  EXPECT_EQ(commutator(A, A).entries.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Quantize, PositivityOfDefiningFunctionCommutator) {
  const auto m = inverted_oscillator();
  for (double h : {0.1, 0.05}) {
    const PhaseGrid g = make_grid(h, -8, 8, 4, 512);
    const double lo = 0.6 * g.momentum_limit(), hi = 0.8 * g.momentum_limit();
    auto cut = [&](const ClosedForm& phi) {
      return ClosedForm([phi, lo, hi](const auto& x, const auto& xi) {
        using T = std::decay_t<decltype(x)>;
        return T(phi(x, xi) * box_cut(T(x)) * smooth::even_bump(T(xi), lo, hi));
      });
    };
    const auto Qp = weyl_quantize(cut(m.phi_plus), g);
    const auto Qm = weyl_quantize(cut(m.phi_minus), g);
    const Eigen::MatrixXcd iC = kI * commutator(Qp, Qm).entries;
    for (double x0 : {0.0, 0.4, -0.3}) {
      const Eigen::VectorXcd v = gaussian(g, x0, 0.3, std::sqrt(h));
      EXPECT_LE(interior_norm(g, iC * v - 2.0 * h * v), 1e-8) << "h=" << h << " x0=" << x0;
    }
  }
}

TEST(Quantize, HermitianForRealSymbols) {
  const PhaseGrid g = make_grid(0.1, -8, 8, 4, 256);
  const ClosedForm a([](const auto& x, const auto& xi) {
    using std::exp;
    using std::sin;
    using T = std::decay_t<decltype(x)>;
    return T(exp(T(-x * x - 2.0 * xi * xi)) * (1.0 + sin(T(3.0 * x * xi))));
  });
  const auto A = weyl_quantize(a, g);
  EXPECT_LE(hermitian_defect(A.entries), 1e-12);
  const auto B = weyl_quantize(SymbolField(g, SymbolField::sample(g, a).values()));
  EXPECT_LE(hermitian_defect(B.entries), 1e-12);
  // The interpolated path stays close to the exact one for a resolved symbol.
  EXPECT_LE((A.entries - B.entries).norm() / A.entries.norm(), 1e-3);
}

TEST(Quantize, MomentumBoundaryRejected) {
  const PhaseGrid g = make_grid(0.2, -8, 8, 4, 64);
  EXPECT_THROW(weyl_quantize(xi_cut(), g), std::domain_error);
}

TEST(Quantize, CommutatorLawSecondOrder) {
  const ClosedForm a([](const auto& x, const auto& xi) {
    using std::exp;
    using T = std::decay_t<decltype(x)>;
    return T(exp(T(-0.5 * x * x - 0.5 * xi * xi)) * (x + 0.5));
  });
  const ClosedForm b([](const auto& x, const auto& xi) {
    using std::cos;
    using std::exp;
    using T = std::decay_t<decltype(x)>;
    return T(exp(T(-0.25 * x * x - 0.5 * xi * xi)) * cos(xi));
  });
  const ClosedForm bracket = ClosedForm::value_only([a, b](double x, double xi) {
    const auto ga = a.gradient(x, xi), gb = b.gradient(x, xi);
    return ga.dxi * gb.dx - ga.dx * gb.dxi;
  });
  std::vector<double> defect;
  for (double h : {0.2, 0.1, 0.05}) {
    const PhaseGrid g = make_grid(h, -8, 8, 10, 256);
    const auto A = weyl_quantize(a, g), B = weyl_quantize(b, g);
    const auto S = weyl_quantize(SymbolField::sample(g, bracket));
    const Eigen::MatrixXcd D = (kI / h) * commutator(A, B).entries - S.entries;
    defect.push_back(op_norm(D).value);
  }
  EXPECT_GT(defect[0] / defect[1], 3.0);
  EXPECT_GT(defect[1] / defect[2], 3.0);
}

TEST(Quantize, QuadraticCommutatorIsExact) {
  const auto m = inverted_oscillator();
  for (double h : {0.2, 0.1}) {
    const PhaseGrid g = make_grid(h, -8, 8, 4, 256);
    const double lo = 0.6 * g.momentum_limit(), hi = 0.8 * g.momentum_limit();
    auto cut = [&](const ClosedForm& f) {
      return ClosedForm([f, lo, hi](const auto& x, const auto& xi) {
        using T = std::decay_t<decltype(x)>;
        return T(f(x, xi) * box_cut(T(x)) * smooth::even_bump(T(xi), lo, hi));
      });
    };
    const auto P = weyl_quantize(cut(m.p), g);
    const auto Q = weyl_quantize(cut(m.phi_plus), g);
    // {p, phi_+} = -2 phi_+ on the plateau.
    const Eigen::MatrixXcd D = (kI / h) * commutator(P, Q).entries + 2.0 * Q.entries;
    const Eigen::VectorXcd v = gaussian(g, 0.2, -0.1, std::sqrt(h));
    EXPECT_LE(interior_norm(g, D * v), 1e-8);
  }
}

TEST(OpNorm, Examples) {
  const Eigen::Index n = 64;
  EXPECT_NEAR(op_norm(Eigen::MatrixXcd::Identity(n, n)).value, 1.0, 1e-10);
  Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) D(i, i) = static_cast<double>(i + 1) / n;
  EXPECT_NEAR(op_norm(D).value, 1.0, 1e-10);

  Eigen::MatrixXcd A = Eigen::MatrixXcd::Random(n, n);
  const double base = op_norm(A).value;
  const cdouble c(-2.0, 1.5);
  EXPECT_NEAR(op_norm(Eigen::MatrixXcd(c * A)).value, std::abs(c) * base, 1e-9 * std::abs(c) * base);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
  EXPECT_NEAR(base, svd.singularValues()(0), 1e-9 * base);
}

TEST(OpNorm, DeterministicAndFlagsNonConvergence) {
  const Eigen::MatrixXcd A = Eigen::MatrixXcd::Random(80, 80);
  EXPECT_EQ(op_norm(A).value, op_norm(A).value);
  const auto capped = op_norm(A, {1e-14, 2, 7});
  EXPECT_FALSE(capped.converged);
  EXPECT_GT(capped.value, 0.0);
  EXPECT_THROW(op_norm(A, {0.0, 10, 1}), std::invalid_argument);
}

TEST(MatrixDump, RoundTripAndLayout) {
  Eigen::MatrixXcd M(3, 3);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) M(r, c) = cdouble(r + 0.25 * c, -c - 0.5 * r);
  std::stringstream ss;
  write_matrix_binary(ss, M);
  const std::string bytes = ss.str();
  ASSERT_EQ(bytes.size(), 8u + 9u * 16u);
  std::uint64_t dim = 0;
  std::memcpy(&dim, bytes.data(), 8);
  EXPECT_EQ(dim, 3u);
  double second[2];
  std::memcpy(second, bytes.data() + 8 + 16, 16);  // row 0, column 1
  EXPECT_EQ(second[0], M(0, 1).real());
  EXPECT_EQ(second[1], M(0, 1).imag());
  EXPECT_EQ(read_matrix_binary(ss), M);
  std::stringstream truncated(bytes.substr(0, 40));
  EXPECT_THROW(read_matrix_binary(truncated), std::runtime_error);
}
