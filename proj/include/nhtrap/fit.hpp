#pragma once
// Model selection between N = C h^{-alpha} and N = h^{-1} (c1 + c2 log(1/h)),
// both fitted by least squares in log N.

#include <Eigen/Dense>
#include <unsupported/Eigen/LevenbergMarquardt>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace nhtrap {

struct PowerFit {
  double log_C = 0.0;
  double alpha = 0.0;
  double residual = 0.0;  // RMS of log residuals
};

struct LogFit {
  double c1 = 0.0;
  double c2 = 0.0;
  double residual = 0.0;
};

enum class FitWinner { kPower, kLog };

struct FitResult {
  PowerFit power;
  LogFit log;
  FitWinner winner = FitWinner::kPower;
  double improvement = 0.0;  // 1 - residual_log / residual_power

  std::string winner_name() const { return winner == FitWinner::kPower ? "power" : "log"; }
};

namespace detail {

struct LogModelFunctor : Eigen::DenseFunctor<double> {
  const Eigen::VectorXd& L;  // log(1/h)
  const Eigen::VectorXd& y;  // log(h N)
  LogModelFunctor(const Eigen::VectorXd& L_, const Eigen::VectorXd& y_)
      : Eigen::DenseFunctor<double>(2, static_cast<int>(L_.size())), L(L_), y(y_) {}

  int operator()(const InputType& c, ValueType& r) const {
    for (Eigen::Index i = 0; i < L.size(); ++i) {
      const double m = c(0) + c(1) * L(i);
      r(i) = m > 0.0 ? std::log(m) - y(i) : 1e3;
    }
    return 0;
  }
  int df(const InputType& c, JacobianType& J) const {
    for (Eigen::Index i = 0; i < L.size(); ++i) {
      const double m = std::max(c(0) + c(1) * L(i), 1e-300);
      J(i, 0) = 1.0 / m;
      J(i, 1) = L(i) / m;
    }
    return 0;
  }
};

inline double rms(const Eigen::VectorXd& r) { return std::sqrt(r.squaredNorm() / r.size()); }

}  // namespace detail

inline FitResult fit_models(const std::vector<double>& h, const std::vector<double>& norm) {
  if (h.size() != norm.size()) throw std::invalid_argument("fit_scaling: size mismatch");
  if (h.size() < 4) throw std::invalid_argument("fit_scaling: need at least 4 points");
  const auto m = static_cast<Eigen::Index>(h.size());
  Eigen::VectorXd L(m), logN(m), y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!(h[i] > 0.0 && norm[i] > 0.0)) throw std::invalid_argument("fit_scaling: nonpositive data");
    L(i) = -std::log(h[i]);
    logN(i) = std::log(norm[i]);
    y(i) = logN(i) - L(i);
  }

  FitResult out;
  {
    Eigen::MatrixXd X(m, 2);
    X.col(0).setOnes();
    X.col(1) = L;
    const Eigen::Vector2d beta = X.colPivHouseholderQr().solve(logN);
    out.power = {beta(0), beta(1), detail::rms(logN - X * beta)};
  }
  {
    // Linear least squares on h N = c1 + c2 L seeds the log-space fit.
    Eigen::MatrixXd X(m, 2);
    X.col(0).setOnes();
    X.col(1) = L;
    Eigen::VectorXd c = X.colPivHouseholderQr().solve(y.array().exp().matrix());
    if ((X * c).minCoeff() <= 0.0) c = Eigen::Vector2d(std::exp(y.mean()), 0.0);
    detail::LogModelFunctor f(L, y);
    Eigen::LevenbergMarquardt<detail::LogModelFunctor> lm(f);
    lm.setXtol(1e-15);
    lm.setFtol(1e-15);
    lm.minimize(c);
    Eigen::VectorXd r(m);
    f(c, r);
    out.log = {c(0), c(1), detail::rms(r)};
  }
  out.winner = out.log.residual + 1e-12 < out.power.residual ? FitWinner::kLog : FitWinner::kPower;
  out.improvement = out.power.residual > 0.0 ? 1.0 - out.log.residual / out.power.residual : 0.0;
  return out;
}

}  // namespace nhtrap
