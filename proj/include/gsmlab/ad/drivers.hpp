#pragma once

// Convenience drivers over the forward and reverse machinery.

#include <Eigen/Core>
#include <array>
#include <cstddef>
#include <utility>

#include "gsmlab/ad/dual.hpp"
#include "gsmlab/ad/eigen_support.hpp"
#include "gsmlab/ad/reverse.hpp"

namespace gsmlab::ad {

template <class S, std::size_t N>
using Leaves = std::array<Active<S>, N>;

template <class S, std::size_t N>
Leaves<S, N> make_leaves(const std::array<S, N>& x) {
  Leaves<S, N> leaves;
  for (std::size_t i = 0; i < N; ++i) leaves[i].set_value(x[i]);
  return leaves;
}

// seed * grad f(x). `f` maps `const Leaves<S, N>&` to a reverse expression.
template <class S, std::size_t N, class F>
std::array<S, N> grad_reverse(F&& f, const std::array<S, N>& x, const S& seed = S(1.0)) {
  auto leaves = make_leaves(x);
  auto expr = f(std::as_const(leaves));
  (void)expr.v();
  expr.back(seed);
  std::array<S, N> g;
  for (std::size_t i = 0; i < N; ++i) g[i] = leaves[i].adjoint();
  return g;
}

// (f(x), Jf(x) dx) for a generic vector map f: Matrix<S, N, 1> -> Matrix<S, K, 1>.
template <int N, class F>
auto forward_jet(F&& f, const Eigen::Matrix<double, N, 1>& x, const Eigen::Matrix<double, N, 1>& dx) {
  using D = Dual<double, 1>;
  Eigen::Matrix<D, N, 1> xd;
  for (int i = 0; i < N; ++i) {
    xd(i) = D(x(i));
    xd(i).d[0] = dx(i);
  }
  const auto yd = f(xd);
  constexpr int K = std::decay_t<decltype(yd)>::RowsAtCompileTime;
  Eigen::Matrix<double, K, 1> y(yd.size()), dy(yd.size());
  for (Eigen::Index i = 0; i < yd.size(); ++i) {
    y(i) = yd(i).v;
    dy(i) = yd(i).d[0];
  }
  return std::pair{y, dy};
}

// Block d^2 f / dx_P dx_Q of a scalar expression f by tangent-over-adjoint:
// reverse sweep over the leaves in P, forward tangents seeded on Q. Leaves
// outside P receive no adjoints.
template <std::size_t NP, std::size_t NQ, std::size_t N, class F>
Eigen::Matrix<double, static_cast<int>(NP), static_cast<int>(NQ)> second_partials(
    F&& f, const std::array<double, N>& x, const std::array<int, NP>& p_idx,
    const std::array<int, NQ>& q_idx) {
  using D = Dual<double, static_cast<int>(NQ)>;
  Leaves<D, N> leaves;
  for (std::size_t i = 0; i < N; ++i) {
    leaves[i].set_value(D(x[i]));
    leaves[i].set_enabled(false);
  }
  for (std::size_t k = 0; k < NQ; ++k) {
    D seeded = leaves[static_cast<std::size_t>(q_idx[k])].value();
    seeded.d[k] = 1.0;
    leaves[static_cast<std::size_t>(q_idx[k])].set_value(seeded);
  }
  for (int i : p_idx) leaves[static_cast<std::size_t>(i)].set_enabled(true);
  auto expr = f(std::as_const(leaves));
  (void)expr.v();
  expr.back(D(1.0));
  Eigen::Matrix<double, static_cast<int>(NP), static_cast<int>(NQ)> h;
  for (std::size_t r = 0; r < NP; ++r)
    for (std::size_t c = 0; c < NQ; ++c)
      h(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          leaves[static_cast<std::size_t>(p_idx[r])].adjoint().d[c];
  return h;
}

}  // namespace gsmlab::ad
