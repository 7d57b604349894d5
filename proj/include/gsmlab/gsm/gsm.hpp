#pragma once

// Constitutive relations of a generalized standard material derived from its
// two potentials:
//
//   sigma = d omega / d eps,  A = -d omega / d a,  a' = f(eps, a) = d psi / dA (A).
//
// A law type provides `omega(eps, a)` and `psi(A)` written against a generic
// scalar/expression interface, plus (optionally) hand-coded partials
// `domega_deps`, `domega_da`, `dpsi_dA`. `Partials::automatic` obtains all
// first partials from the potentials by expression-level reverse mode;
// `Partials::hand` uses the hand-coded ones. Higher derivatives are layered
// on top with forward types in both cases.

#include <array>
#include <stdexcept>
#include <type_traits>

#include "gsmlab/ad/dual.hpp"
#include "gsmlab/ad/eigen_support.hpp"
#include "gsmlab/ad/reverse.hpp"
#include "gsmlab/linalg/types.hpp"

namespace gsmlab::gsm {

enum class Partials { automatic, hand };

template <class Law>
concept GsmLaw = requires(const Law& law) {
  { Law::kInternal } -> std::convertible_to<int>;
  { law.elastic_stiffness() } -> std::convertible_to<StiffnessMat<>>;
};

template <class Law, class S>
using State = SmallVec<S, Law::kInternal>;

template <class S>
inline constexpr bool kIsSecondOrder = false;
template <std::floating_point T, int N, int M>
inline constexpr bool kIsSecondOrder<ad::Dual2<T, N, M>> = true;

namespace detail {

// Reverse over a first-order or plain scalar is at most second order overall.
template <class S>
void require_automatic_order() {
  static_assert(!kIsSecondOrder<S>,
                "automatic partials over second-order forward types would need third derivatives");
}

template <class S, std::size_t N, class Leaf, class Vec>
std::array<Leaf, N> leaves_from(const Vec& v) {
  std::array<Leaf, N> out;
  for (std::size_t i = 0; i < N; ++i) out[i].set_value(v(static_cast<Eigen::Index>(i)));
  return out;
}

}  // namespace detail

template <GsmLaw Law, class S>
VoigtVec<S> stress_automatic(const Law& law, const VoigtVec<S>& eps, const State<Law, S>& a) {
  detail::require_automatic_order<S>();
  constexpr std::size_t m = Law::kInternal;
  const auto eps_leaves = detail::leaves_from<S, 6, ad::Active<S>>(eps);
  const auto a_leaves = detail::leaves_from<S, m, ad::Passive<S>>(a);
  law.omega(eps_leaves, a_leaves).back(S(1.0));
  VoigtVec<S> sig;
  for (int i = 0; i < 6; ++i) sig(i) = eps_leaves[static_cast<std::size_t>(i)].adjoint();
  return sig;
}

template <GsmLaw Law, class S>
State<Law, S> generalized_stress_automatic(const Law& law, const VoigtVec<S>& eps, const State<Law, S>& a) {
  detail::require_automatic_order<S>();
  constexpr std::size_t m = Law::kInternal;
  State<Law, S> out;
  if constexpr (m > 0) {
    const auto eps_leaves = detail::leaves_from<S, 6, ad::Passive<S>>(eps);
    const auto a_leaves = detail::leaves_from<S, m, ad::Active<S>>(a);
    law.omega(eps_leaves, a_leaves).back(S(-1.0));
    for (std::size_t i = 0; i < m; ++i) out(static_cast<Eigen::Index>(i)) = a_leaves[i].adjoint();
  }
  return out;
}

template <GsmLaw Law, class S>
State<Law, S> force_gradient_automatic(const Law& law, const State<Law, S>& big_a) {
  detail::require_automatic_order<S>();
  constexpr std::size_t m = Law::kInternal;
  State<Law, S> out;
  if constexpr (m > 0) {
    const auto leaves = detail::leaves_from<S, m, ad::Active<S>>(big_a);
    law.psi(leaves).back(S(1.0));
    for (std::size_t i = 0; i < m; ++i) out(static_cast<Eigen::Index>(i)) = leaves[i].adjoint();
  }
  return out;
}

// sigma = d omega / d eps
template <GsmLaw Law, class S>
VoigtVec<S> stress(const Law& law, Partials mode, const VoigtVec<S>& eps, const State<Law, S>& a) {
  if (mode == Partials::hand) return law.domega_deps(eps, a);
  if constexpr (kIsSecondOrder<S>) {
    throw std::logic_error("stress: automatic partials unavailable for second-order types");
  } else {
    return stress_automatic(law, eps, a);
  }
}

// A = -d omega / d a
template <GsmLaw Law, class S>
State<Law, S> generalized_stress(const Law& law, Partials mode, const VoigtVec<S>& eps,
                                 const State<Law, S>& a) {
  if (mode == Partials::hand) return -law.domega_da(eps, a);
  if constexpr (kIsSecondOrder<S>) {
    throw std::logic_error("generalized_stress: automatic partials unavailable for second-order types");
  } else {
    return generalized_stress_automatic(law, eps, a);
  }
}

// f(eps, a) = d psi / dA (-d omega / d a)
template <GsmLaw Law, class S>
State<Law, S> evolution_rhs(const Law& law, Partials mode, const VoigtVec<S>& eps, const State<Law, S>& a) {
  if constexpr (Law::kInternal == 0) {
    return State<Law, S>();
  } else {
    const State<Law, S> big_a = generalized_stress(law, mode, eps, a);
    if (mode == Partials::hand) return law.dpsi_dA(big_a);
    if constexpr (kIsSecondOrder<S>) {
      throw std::logic_error("evolution_rhs: automatic partials unavailable for second-order types");
    } else {
      return force_gradient_automatic(law, big_a);
    }
  }
}

// df/da (m x m) by forward mode over evolution_rhs.
template <GsmLaw Law>
SmallMat<double, Law::kInternal, Law::kInternal> rhs_jacobian(const Law& law, Partials mode,
                                                               const VoigtVec<>& eps, const State<Law, double>& a) {
  constexpr int m = Law::kInternal;
  SmallMat<double, m, m> jac = SmallMat<double, m, m>::Zero();
  if constexpr (m > 0) {
    using D = ad::Dual<double, m>;
    const VoigtVec<D> eps_d = eps.template cast<D>();
    State<Law, D> a_d;
    for (int i = 0; i < m; ++i) a_d(i) = D::variable(a(i), i);
    const State<Law, D> f = evolution_rhs(law, mode, eps_d, a_d);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) jac(i, j) = f(i).d[static_cast<std::size_t>(j)];
  }
  return jac;
}

// df/deps (m x 6).
template <GsmLaw Law>
SmallMat<double, Law::kInternal, 6> rhs_strain_jacobian(const Law& law, Partials mode, const VoigtVec<>& eps,
                                                        const State<Law, double>& a) {
  constexpr int m = Law::kInternal;
  SmallMat<double, m, 6> jac = SmallMat<double, m, 6>::Zero();
  if constexpr (m > 0) {
    using D = ad::Dual<double, 6>;
    VoigtVec<D> eps_d;
    for (int i = 0; i < 6; ++i) eps_d(i) = D::variable(eps(i), i);
    const State<Law, D> a_d = a.template cast<D>();
    const State<Law, D> f = evolution_rhs(law, mode, eps_d, a_d);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < 6; ++j) jac(i, j) = f(i).d[static_cast<std::size_t>(j)];
  }
  return jac;
}

// Stress together with d sigma / d eps_{n+1} given d a / d eps_{n+1}. The
// strain tangent seed is `eps_seed * I` (1 at the end of a step).
template <GsmLaw Law>
std::pair<VoigtVec<>, StiffnessMat<>> stress_with_tangent(const Law& law, Partials mode, const VoigtVec<>& eps,
                                                          const State<Law, double>& a,
                                                          const SmallMat<double, Law::kInternal, 6>& da_deps,
                                                          double eps_seed = 1.0) {
  constexpr int m = Law::kInternal;
  using D = ad::Dual<double, 6>;
  VoigtVec<D> eps_d;
  for (int i = 0; i < 6; ++i) {
    eps_d(i) = D(eps(i));
    eps_d(i).d[static_cast<std::size_t>(i)] = eps_seed;
  }
  State<Law, D> a_d;
  for (int i = 0; i < m; ++i) {
    a_d(i) = D(a(i));
    for (int j = 0; j < 6; ++j) a_d(i).d[static_cast<std::size_t>(j)] = da_deps(i, j);
  }
  const VoigtVec<D> sig = stress(law, mode, eps_d, a_d);
  VoigtVec<> s;
  StiffnessMat<> c;
  for (int i = 0; i < 6; ++i) {
    s(i) = sig(i).v;
    for (int j = 0; j < 6; ++j) c(i, j) = sig(i).d[static_cast<std::size_t>(j)];
  }
  return {s, c};
}

}  // namespace gsmlab::gsm
