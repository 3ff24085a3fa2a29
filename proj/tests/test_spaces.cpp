#include "nhtrap/spaces.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <random>

using namespace nhtrap;

namespace {

const ModelSpec& model() {
  static const ModelSpec m = inverted_oscillator();
  return m;
}

// Frames are expensive; build each h once per process.
const NormFrame& frame_at(double h) {
  static std::map<double, NormFrame> cache;
  auto it = cache.find(h);
  if (it == cache.end())
    it = cache.emplace(h, build_frame(model(), make_grid(h, -8, 8, 4, 512))).first;
  return it->second;
}

Eigen::VectorXcd coherent(const PhaseGrid& g, double x0, double xi0) {
  Eigen::VectorXcd v(g.n_x());
  const double s = std::sqrt(g.h());
  for (Eigen::Index j = 0; j < g.n_x(); ++j) {
    const double y = (g.x(j) - x0) / s;
    v(j) = std::exp(-0.5 * y * y) * std::polar(1.0, xi0 * g.x(j) / g.h());
  }
  return v / v.norm();
}

Eigen::VectorXcd random_vector(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    v(i) = {re, im};
  }
  return v;
}

// Worst factor by which the norm of frame b can differ from that of frame a.
double equivalence_factor(const NormFrame& a, const NormFrame& b) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> ges(b.G(), a.G(), Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = ges.eigenvalues();
  return std::sqrt(std::max(ev(ev.size() - 1), 1.0 / ev(0)));
}

}  // namespace

TEST(Frame, GramBoundedBelowByH) {
  const NormFrame& f = frame_at(0.1);
  EXPECT_GE(f.eigenvalues()(0) - f.h(), -1e-10);
  EXPECT_LE(hermitian_defect(f.G()), 1e-15);
}

TEST(Frame, SquareRootSquaresToGram) {
  const NormFrame& f = frame_at(0.1);
  EXPECT_LE((f.sqrtG() * f.sqrtG() - f.G()).norm() / f.G().norm(), 1e-9);
}

TEST(Frame, StandardL2AwayFromTrapping) {
  const NormFrame& f = frame_at(0.1);
  const PhaseGrid& g = f.grid();
  for (double x : {-6.0, 5.0}) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(g.n_x());
    e(static_cast<Eigen::Index>(std::lround((x - g.x_min()) / g.dx()))) = 1.0;
    const double r = f.norm_iso(e);
    EXPECT_GE(r, 0.9);
    EXPECT_LE(r, 1.5);
  }
}

TEST(Frame, CoherentStateAtTrappedSetScalesLikeH) {
  auto ratio = [](double h) {
    const NormFrame& f = frame_at(h);
    const Eigen::VectorXcd u = coherent(f.grid(), 0.0, 0.0);
    return std::pow(f.norm_iso(u), 2);
  };
  const double drop = ratio(0.1) / ratio(0.025);
  EXPECT_GT(drop, 3.0);
  EXPECT_LT(drop, 5.0);
}

TEST(Frame, RejectsCoarseGrid) {
  EXPECT_THROW(build_frame(model(), make_grid(0.5, -8, 8, 4, 128)), std::invalid_argument);
}

TEST(DualNorm, PairingBound) {
  const NormFrame& f = frame_at(0.1);
  std::mt19937_64 rng(7);
  for (int i = 0; i < 100; ++i) {
    const Eigen::VectorXcd u = random_vector(f.grid().n_x(), rng);
    const Eigen::VectorXcd v = random_vector(f.grid().n_x(), rng);
    const double bound = f.norm_iso_dual(v) * f.norm_iso(u);
    EXPECT_LE(std::abs(v.dot(u)), bound * (1.0 + 1e-12));
  }
}

TEST(DualNorm, BoundedByInverseRootH) {
  const NormFrame& f = frame_at(0.1);
  std::mt19937_64 rng(11);
  for (int i = 0; i < 20; ++i) {
    const Eigen::VectorXcd v = random_vector(f.grid().n_x(), rng);
    EXPECT_LE(f.norm_iso_dual(v), v.norm() / std::sqrt(f.h()) * (1.0 + 1e-12));
  }
}

TEST(DualNorm, GramImageIdentity) {
  const NormFrame& f = frame_at(0.1);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 10; ++i) {
    const Eigen::VectorXcd u = random_vector(f.grid().n_x(), rng);
    const Eigen::VectorXcd Gu = f.G() * u;
    EXPECT_NEAR(f.norm_iso_dual(Gu), f.norm_iso(u), 1e-10 * f.norm_iso(u));
  }
  EXPECT_THROW(f.norm_iso(Eigen::VectorXcd::Zero(3)), std::invalid_argument);
}

TEST(NormEquivalence, LowerBoundAndUpperBound) {
  for (double h : {0.2, 0.1}) {
    const auto eq = check_norm_equivalence(frame_at(h));
    EXPECT_GE(eq.c_lower, 0.3) << h;
    EXPECT_LE(eq.C_upper, 1.0);
    EXPECT_GT(eq.C_upper, 0.95);
  }
}

TEST(NormEquivalence, BrokenTransversalityLowersConstant) {
  // Qm replaced by Qp: the constant must drop below the transversal one and
  // keep dropping as h shrinks.
  double prev = 1.0;
  for (double h : {0.2, 0.1, 0.05}) {
    const NormFrame bad =
        build_frame(model(), make_grid(h, -8, 8, 4, 512), {model().phi_plus, model().phi_plus});
    const double c = check_norm_equivalence(bad).c_lower;
    EXPECT_LT(c, check_norm_equivalence(frame_at(h)).c_lower);
    EXPECT_LT(c, prev);
    prev = c;
  }
}

TEST(FrameIndependence, RescaledAndShiftedDefiningFunctions) {
  const ClosedForm twice_plus([](const auto& x, const auto& xi) {
    using T = std::decay_t<decltype(x)>;
    return T(2.0 * (xi - x));
  });
  const ClosedForm twice_minus([](const auto& x, const auto& xi) {
    using T = std::decay_t<decltype(x)>;
    return T(2.0 * (xi + x));
  });
  const ClosedForm shifted_plus([](const auto& x, const auto& xi) {
    using T = std::decay_t<decltype(x)>;
    return T(xi - x + 0.1 * (xi * xi - x * x));
  });
  const ClosedForm shifted_minus([](const auto& x, const auto& xi) {
    using T = std::decay_t<decltype(x)>;
    return T(xi + x + 0.1 * (xi * xi - x * x));
  });
  for (double h : {0.2, 0.1}) {
    const PhaseGrid g = make_grid(h, -8, 8, 4, 512);
    const NormFrame& base = frame_at(h);
    EXPECT_LE(equivalence_factor(base, build_frame(model(), g, {twice_plus, twice_minus})), 4.0);
    EXPECT_LE(equivalence_factor(base, build_frame(model(), g, {shifted_plus, shifted_minus})), 4.0);
  }
}

TEST(PsiBoundedness, CutoffActsBoundedly) {
  // ||S B S^{-1}|| bounds norm_iso(Bu) / norm_iso(u); it must stay h-stable.
  std::vector<double> constants;
  for (double h : {0.2, 0.1, 0.05}) {
    const NormFrame& f = frame_at(h);
    const OperatorMatrix B = weyl_quantize(radial_plateau(0.4, 1.2), f.grid());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(f.G());
    const Eigen::VectorXd inv_root = eig.eigenvalues().cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXcd S_inv = eig.eigenvectors() * inv_root.asDiagonal() * eig.eigenvectors().adjoint();
    const Eigen::MatrixXcd T = f.sqrtG() * B.entries * S_inv;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> tt(T.adjoint() * T, Eigen::EigenvaluesOnly);
    constants.push_back(std::sqrt(tt.eigenvalues().maxCoeff()));
  }
  const double hi = *std::max_element(constants.begin(), constants.end());
  const double lo = *std::min_element(constants.begin(), constants.end());
  EXPECT_LE(hi / lo, 2.0);
  EXPECT_LE(hi, 3.0);
}
