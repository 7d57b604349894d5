#pragma once

// Parameter-dependent ODE systems  y' = f(t, y, p)  and the derivative bundles
// the integrators need, all obtained by forward AD over one templated rhs.
//
// A system provides
//   kDim, kParams
//   double duration()                    integration interval [0, duration]
//   const SmallVec<double, kParams>& params()
//   template <class S> SmallVec<S, kDim> rhs(const S& t, const SmallVec<S, kDim>& y,
//                                            const SmallVec<S, kParams>& p)

#include <array>
#include <concepts>
#include <utility>

#include "gsmlab/ad/dual.hpp"
#include "gsmlab/ad/eigen_support.hpp"
#include "gsmlab/gsm/gsm.hpp"
#include "gsmlab/linalg/types.hpp"

namespace gsmlab::odeint {

template <class Sys>
concept OdeSystem = requires(const Sys& s) {
  { Sys::kDim } -> std::convertible_to<int>;
  { Sys::kParams } -> std::convertible_to<int>;
  { s.duration() } -> std::convertible_to<double>;
  { s.params() } -> std::convertible_to<SmallVec<double, Sys::kParams>>;
  { s.template rhs<double>(0.0, SmallVec<double, Sys::kDim>(), SmallVec<double, Sys::kParams>()) }
      -> std::convertible_to<SmallVec<double, Sys::kDim>>;
};

// Systems that can map internal states to stresses (stress-driven error control).
template <class Sys>
concept StressImage = OdeSystem<Sys> && requires(const Sys& s, const SmallVec<double, Sys::kDim>& y,
                                                 const SmallMat<double, Sys::kDim, Sys::kParams>& dy) {
  { s.stress_at(0.0, y) } -> std::convertible_to<VoigtVec<>>;
  { s.stress_tangent_at(0.0, y, dy) } -> std::convertible_to<std::pair<VoigtVec<>, StiffnessMat<>>>;
};

template <class Sys>
using Vec = SmallVec<double, Sys::kDim>;
template <class Sys>
using Mat = SmallMat<double, Sys::kDim, Sys::kDim>;
template <class Sys>
using Sens = SmallMat<double, Sys::kDim, Sys::kParams>;

// ---------------------------------------------------------------------------
// GSM evolution equation over one loading step. Time runs over [0, dt], the
// strain is interpolated linearly from eps_n to the parameter p = eps_{n+1}.

template <gsm::GsmLaw Law>
class GsmSystem {
 public:
  static constexpr int kDim = Law::kInternal;
  static constexpr int kParams = 6;

  GsmSystem(const Law& law, gsm::Partials mode, const VoigtVec<>& eps_n, const VoigtVec<>& eps_np1, double dt)
      : law_(&law), mode_(mode), eps_n_(eps_n), eps_np1_(eps_np1), dt_(dt) {}

  double duration() const { return dt_; }
  const VoigtVec<>& params() const { return eps_np1_; }
  const Law& law() const { return *law_; }
  gsm::Partials mode() const { return mode_; }

  template <class S>
  VoigtVec<S> strain_at(const S& t, const SmallVec<S, 6>& p) const {
    const S s = t / dt_;
    VoigtVec<S> eps;
    for (int i = 0; i < 6; ++i) eps(i) = eps_n_(i) * (1.0 - s) + p(i) * s;
    return eps;
  }

  template <class S>
  SmallVec<S, kDim> rhs(const S& t, const SmallVec<S, kDim>& y, const SmallVec<S, 6>& p) const {
    return gsm::evolution_rhs(*law_, mode_, strain_at(t, p), y);
  }

  VoigtVec<> stress_at(double t, const Vec<GsmSystem>& y) const {
    return gsm::stress(*law_, mode_, strain_at(t, eps_np1_), y);
  }

  // Stress and its derivative with respect to eps_{n+1} given dy/deps_{n+1};
  // the strain itself depends on eps_{n+1} with weight t / dt.
  std::pair<VoigtVec<>, StiffnessMat<>> stress_tangent_at(double t, const Vec<GsmSystem>& y,
                                                          const Sens<GsmSystem>& dy) const {
    return gsm::stress_with_tangent(*law_, mode_, strain_at(t, eps_np1_), y, dy, t / dt_);
  }

 private:
  const Law* law_;
  gsm::Partials mode_;
  VoigtVec<> eps_n_;
  VoigtVec<> eps_np1_;
  double dt_;
};

// ---------------------------------------------------------------------------
// derivative bundles

template <class Sys>
Vec<Sys> rhs(const Sys& sys, double t, const Vec<Sys>& y) {
  return sys.template rhs<double>(t, y, sys.params());
}

template <class Sys>
struct Linearization {
  Vec<Sys> f;
  Mat<Sys> jac;    // df/dy
  Vec<Sys> f_t;    // df/dt
};

// f, df/dy and df/dt in one forward sweep of width kDim + 1.
template <class Sys>
Linearization<Sys> linearize(const Sys& sys, double t, const Vec<Sys>& y) {
  constexpr int m = Sys::kDim;
  constexpr int P = Sys::kParams;
  using D = ad::Dual<double, m + 1>;
  SmallVec<D, m> yd;
  for (int i = 0; i < m; ++i) yd(i) = D::variable(y(i), i);
  const D td = D::variable(t, m);
  SmallVec<D, P> pd;
  for (int k = 0; k < P; ++k) pd(k) = D(sys.params()(k));
  const SmallVec<D, m> fd = sys.template rhs<D>(td, yd, pd);
  Linearization<Sys> out;
  for (int i = 0; i < m; ++i) {
    out.f(i) = fd(i).v;
    for (int j = 0; j < m; ++j) out.jac(i, j) = fd(i).d[static_cast<std::size_t>(j)];
    out.f_t(i) = fd(i).d[static_cast<std::size_t>(m)];
  }
  return out;
}

// f and g = df/dy dy + df/dp: the right-hand side of the state/sensitivity pair.
template <class Sys>
std::pair<Vec<Sys>, Sens<Sys>> coupled_rhs(const Sys& sys, double t, const Vec<Sys>& y, const Sens<Sys>& dy) {
  constexpr int m = Sys::kDim;
  constexpr int P = Sys::kParams;
  using D = ad::Dual<double, P>;
  SmallVec<D, m> yd;
  for (int i = 0; i < m; ++i) {
    yd(i) = D(y(i));
    for (int k = 0; k < P; ++k) yd(i).d[static_cast<std::size_t>(k)] = dy(i, k);
  }
  SmallVec<D, P> pd;
  for (int k = 0; k < P; ++k) pd(k) = D::variable(sys.params()(k), k);
  const SmallVec<D, m> fd = sys.template rhs<D>(D(t), yd, pd);
  std::pair<Vec<Sys>, Sens<Sys>> out;
  for (int i = 0; i < m; ++i) {
    out.first(i) = fd(i).v;
    for (int k = 0; k < P; ++k) out.second(i, k) = fd(i).d[static_cast<std::size_t>(k)];
  }
  return out;
}

template <class Sys>
struct CoupledLinearization {
  Vec<Sys> f;
  Mat<Sys> jac;
  Vec<Sys> f_t;
  Sens<Sys> g;                                // df/dy dy + df/dp
  std::array<Sens<Sys>, Sys::kDim> dg_dy;     // dg/dy_j
  Sens<Sys> g_t;                              // dg/dt
};

// Linearization of the state/sensitivity pair: a second-order sweep with the
// first family on (y, t) and the second family on the sensitivity directions.
template <class Sys>
CoupledLinearization<Sys> coupled_linearize(const Sys& sys, double t, const Vec<Sys>& y, const Sens<Sys>& dy) {
  constexpr int m = Sys::kDim;
  constexpr int P = Sys::kParams;
  using D = ad::Dual2<double, m + 1, P>;
  SmallVec<D, m> yd;
  for (int i = 0; i < m; ++i) {
    yd(i) = D(y(i));
    yd(i).d1[static_cast<std::size_t>(i)] = 1.0;
    for (int k = 0; k < P; ++k) yd(i).d2[static_cast<std::size_t>(k)] = dy(i, k);
  }
  D td(t);
  td.d1[static_cast<std::size_t>(m)] = 1.0;
  SmallVec<D, P> pd;
  for (int k = 0; k < P; ++k) {
    pd(k) = D(sys.params()(k));
    pd(k).d2[static_cast<std::size_t>(k)] = 1.0;
  }
  const SmallVec<D, m> fd = sys.template rhs<D>(td, yd, pd);
  CoupledLinearization<Sys> out;
  for (int i = 0; i < m; ++i) {
    const D& fi = fd(i);
    out.f(i) = fi.v;
    for (int j = 0; j < m; ++j) out.jac(i, j) = fi.d1[static_cast<std::size_t>(j)];
    out.f_t(i) = fi.d1[static_cast<std::size_t>(m)];
    for (int k = 0; k < P; ++k) {
      out.g(i, k) = fi.d2[static_cast<std::size_t>(k)];
      for (int j = 0; j < m; ++j) out.dg_dy[static_cast<std::size_t>(j)](i, k) = fi.d12[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
      out.g_t(i, k) = fi.d12[static_cast<std::size_t>(m)][static_cast<std::size_t>(k)];
    }
  }
  return out;
}

}  // namespace gsmlab::odeint
