#pragma once
// Forward-mode derivatives on top of Eigen's AutoDiffScalar.
//
// Closed-form symbols are written once as generic callables and instantiated
// with double (values) or Jet<N> (values plus N partial derivatives).  Eigen's
// AutoDiff uses expression templates, so generic code must always materialize
// intermediates into the scalar type T rather than `auto`.

#include <Eigen/Core>
#include <unsupported/Eigen/AutoDiff>

#include <cmath>
#include <type_traits>

namespace nhtrap {

template <int N>
using Jet = Eigen::AutoDiffScalar<Eigen::Matrix<double, N, 1>>;

using Jet2 = Jet<2>;
using Jet5 = Jet<5>;

inline double value_of(double x) { return x; }

template <typename D>
double value_of(const Eigen::AutoDiffScalar<D>& x) {
  return x.value();
}

/// Independent variable number `i` of an N-direction jet.
template <int N>
Jet<N> make_variable(double value, int i) {
  Jet<N> j(value);
  j.derivatives().setZero();
  j.derivatives()(i) = 1.0;
  return j;
}

template <int N>
Jet<N> make_constant(double value) {
  Jet<N> j(value);
  j.derivatives().setZero();
  return j;
}

template <typename T>
inline constexpr bool is_jet_v = !std::is_same_v<std::decay_t<T>, double>;

}  // namespace nhtrap
