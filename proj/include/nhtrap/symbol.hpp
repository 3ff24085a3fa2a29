#pragma once
// Phase-space symbols: closed-form evaluators with exact first derivatives,
// and sampled fields on a PhaseGrid.

#include "nhtrap/grid.hpp"
#include "nhtrap/jet.hpp"

#include <Eigen/Core>

#include <concepts>
#include <functional>
#include <optional>
#include <stdexcept>
#include <type_traits>
#include <utility>

namespace nhtrap {

struct Point {
  double x = 0.0;
  double xi = 0.0;
};

struct SymbolGradient {
  double value = 0.0;
  double dx = 0.0;
  double dxi = 0.0;
};

/// A real symbol a(x, xi) given by one generic callable, instantiated for
/// plain values and for Jet2 (value plus d/dx, d/dxi).
class ClosedForm {
 public:
  template <typename F>
    requires(!std::same_as<std::decay_t<F>, ClosedForm> &&
             std::same_as<std::invoke_result_t<const F&, double, double>, double> &&
             std::same_as<std::invoke_result_t<const F&, const Jet2&, const Jet2&>, Jet2>)
  explicit ClosedForm(F f) : value_(f), jet_(std::move(f)) {}

  /// Evaluator without derivative information; jet evaluation throws.
  static ClosedForm value_only(std::function<double(double, double)> f) {
    return ClosedForm(std::move(f), [](const Jet2&, const Jet2&) -> Jet2 {
      throw std::logic_error("ClosedForm: derivatives unavailable for a value-only symbol");
    });
  }

  double operator()(double x, double xi) const { return value_(x, xi); }
  Jet2 operator()(const Jet2& x, const Jet2& xi) const { return jet_(x, xi); }

  SymbolGradient gradient(double x, double xi) const {
    const Jet2 j = jet_(make_variable<2>(x, 0), make_variable<2>(xi, 1));
    return {j.value(), j.derivatives()(0), j.derivatives()(1)};
  }

 private:
  ClosedForm(std::function<double(double, double)> v, std::function<Jet2(const Jet2&, const Jet2&)> j)
      : value_(std::move(v)), jet_(std::move(j)) {}

  std::function<double(double, double)> value_;
  std::function<Jet2(const Jet2&, const Jet2&)> jet_;
};

/// Real scalar field sampled on the (x-node, xi-node) lattice of a grid.
class SymbolField {
 public:
  SymbolField(PhaseGrid grid, Eigen::MatrixXd values, std::optional<ClosedForm> closed_form = {})
      : grid_(std::move(grid)), values_(std::move(values)), closed_form_(std::move(closed_form)) {
    if (values_.rows() != grid_.n_x() || values_.cols() != grid_.n_x())
      throw std::invalid_argument("SymbolField: value array does not match grid");
    if (!values_.allFinite()) throw std::domain_error("SymbolField: non-finite symbol values");
  }

  static SymbolField sample(const PhaseGrid& grid, const ClosedForm& f) {
    const Eigen::Index n = grid.n_x();
    Eigen::MatrixXd v(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double xi = grid.xi(k);
      for (Eigen::Index j = 0; j < n; ++j) v(j, k) = f(grid.x(j), xi);
    }
    return SymbolField(grid, std::move(v), f);
  }

  const PhaseGrid& grid() const { return grid_; }
  const Eigen::MatrixXd& values() const { return values_; }
  const std::optional<ClosedForm>& closed_form() const { return closed_form_; }
  bool has_closed_form() const { return closed_form_.has_value(); }
  double operator()(Eigen::Index j, Eigen::Index k) const { return values_(j, k); }

 private:
  PhaseGrid grid_;
  Eigen::MatrixXd values_;
  std::optional<ClosedForm> closed_form_;
};

namespace detail {

// Second-order derivative along one axis: centered inside, one-sided at ends.
inline Eigen::MatrixXd finite_difference(const Eigen::MatrixXd& f, double step, bool along_rows) {
  const Eigen::Index n = along_rows ? f.rows() : f.cols();
  if (n < 3) throw std::invalid_argument("finite_difference: need at least 3 nodes");
  Eigen::MatrixXd d(f.rows(), f.cols());
  auto at = [&](Eigen::Index i, Eigen::Index o) { return along_rows ? f(i, o) : f(o, i); };
  auto put = [&](Eigen::Index i, Eigen::Index o, double v) {
    if (along_rows) d(i, o) = v; else d(o, i) = v;
  };
  const Eigen::Index other = along_rows ? f.cols() : f.rows();
  for (Eigen::Index o = 0; o < other; ++o) {
    put(0, o, (-3.0 * at(0, o) + 4.0 * at(1, o) - at(2, o)) / (2.0 * step));
    for (Eigen::Index i = 1; i + 1 < n; ++i) put(i, o, (at(i + 1, o) - at(i - 1, o)) / (2.0 * step));
    put(n - 1, o, (3.0 * at(n - 1, o) - 4.0 * at(n - 2, o) + at(n - 3, o)) / (2.0 * step));
  }
  return d;
}

}  // namespace detail

/// {a,b} = d_xi a d_x b - d_x a d_xi b on the shared grid.
inline SymbolField poisson_bracket(const SymbolField& a, const SymbolField& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("poisson_bracket: grid mismatch");
  const PhaseGrid& g = a.grid();
  const Eigen::Index n = g.n_x();
  Eigen::MatrixXd out(n, n);
  if (a.has_closed_form() && b.has_closed_form()) {
    const ClosedForm& fa = *a.closed_form();
    const ClosedForm& fb = *b.closed_form();
    for (Eigen::Index k = 0; k < n; ++k) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const SymbolGradient ga = fa.gradient(g.x(j), g.xi(k));
        const SymbolGradient gb = fb.gradient(g.x(j), g.xi(k));
        out(j, k) = ga.dxi * gb.dx - ga.dx * gb.dxi;
      }
    }
  } else {
    const Eigen::MatrixXd ax = detail::finite_difference(a.values(), g.dx(), true);
    const Eigen::MatrixXd axi = detail::finite_difference(a.values(), g.dxi(), false);
    const Eigen::MatrixXd bx = detail::finite_difference(b.values(), g.dx(), true);
    const Eigen::MatrixXd bxi = detail::finite_difference(b.values(), g.dxi(), false);
    out = axi.cwiseProduct(bx) - ax.cwiseProduct(bxi);
  }
  return SymbolField(g, std::move(out));
}

}  // namespace nhtrap
