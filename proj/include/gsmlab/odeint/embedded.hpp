#pragma once

// Embedded explicit and linearly-implicit schemes with adaptive step size.
//
// One stage engine runs on three state representations ("bundles"):
//   PrimalBundle    y alone, doubles
//   CoupledBundle   [y | dy/dp] as an m x (1 + P) matrix: the scheme applied to
//                   the state/sensitivity system
//   FrozenBundle    y with forward tangents in p, replaying recorded step
//                   sizes; linear solves use the implicit-function rule
// The coupled and frozen results coincide up to round-off.

#include <array>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gsmlab/ad/dual.hpp"
#include "gsmlab/linalg/lu.hpp"
#include "gsmlab/odeint/controller.hpp"
#include "gsmlab/odeint/scheme.hpp"
#include "gsmlab/odeint/system.hpp"

namespace gsmlab::odeint {

// ---------------------------------------------------------------------------
// bundles

template <class Sys>
class PrimalBundle {
 public:
  using State = Vec<Sys>;

  explicit PrimalBundle(const Sys& sys) : sys_(&sys) {}

  State eval(double t, const State& y) const { return rhs(*sys_, t, y); }
  void linearize(double t, const State& y) {
    const Linearization<Sys> lin = odeint::linearize(*sys_, t, y);
    jac_ = lin.jac;
    f_t_ = lin.f_t;
  }
  void factor(double gamma_h) { lu_.compute(Mat<Sys>::Identity() - gamma_h * jac_); }
  State solve(const State& r) const { return lu_.solve(r); }
  State apply_jacobian(const State& k) const { return jac_ * k; }
  const State& time_derivative() const { return f_t_; }
  static State zero() { return State::Zero(); }

 private:
  const Sys* sys_;
  Mat<Sys> jac_ = Mat<Sys>::Zero();
  Vec<Sys> f_t_ = Vec<Sys>::Zero();
  linalg::SmallLu<double, Sys::kDim> lu_;
};

template <class Sys>
class CoupledBundle {
 public:
  static constexpr int m = Sys::kDim;
  static constexpr int P = Sys::kParams;
  using State = SmallMat<double, m, 1 + P>;

  explicit CoupledBundle(const Sys& sys) : sys_(&sys) {}

  static Vec<Sys> primal(const State& y) { return y.col(0); }
  static Sens<Sys> sensitivity(const State& y) { return y.template rightCols<P>(); }
  static State pack(const Vec<Sys>& y, const Sens<Sys>& dy) {
    State s;
    s.col(0) = y;
    s.template rightCols<P>() = dy;
    return s;
  }

  State eval(double t, const State& y) const {
    const auto [f, g] = coupled_rhs(*sys_, t, primal(y), sensitivity(y));
    return pack(f, g);
  }
  void linearize(double t, const State& y) { lin_ = coupled_linearize(*sys_, t, primal(y), sensitivity(y)); }
  void factor(double gamma_h) {
    gamma_h_ = gamma_h;
    lu_.compute(Mat<Sys>::Identity() - gamma_h * lin_.jac);
  }
  // (I - gh Jc) X = R with the block lower-triangular Jc = [[J, 0], [dg/dy, J]].
  State solve(const State& r) const {
    State x;
    x.col(0) = lu_.solve(Vec<Sys>(r.col(0)));
    const Sens<Sys> rhs_sens = sensitivity(r) + gamma_h_ * cross(x.col(0));
    x.template rightCols<P>() = lu_.solve(rhs_sens);
    return x;
  }
  State apply_jacobian(const State& k) const {
    State out;
    out.col(0) = lin_.jac * k.col(0);
    out.template rightCols<P>() = lin_.jac * sensitivity(k) + cross(k.col(0));
    return out;
  }
  State time_derivative() const { return pack(lin_.f_t, lin_.g_t); }
  static State zero() { return State::Zero(); }

 private:
  // (dg/dy) applied to a state increment.
  Sens<Sys> cross(const Vec<Sys>& k) const {
    Sens<Sys> s = Sens<Sys>::Zero();
    for (int j = 0; j < m; ++j)
      if (k(j) != 0.0) s += k(j) * lin_.dg_dy[static_cast<std::size_t>(j)];
    return s;
  }

  const Sys* sys_;
  CoupledLinearization<Sys> lin_{};
  double gamma_h_ = 0.0;
  linalg::SmallLu<double, m> lu_;
};

template <class Sys>
class FrozenBundle {
 public:
  static constexpr int m = Sys::kDim;
  static constexpr int P = Sys::kParams;
  using D = ad::Dual<double, P>;
  using State = SmallVec<D, m>;

  explicit FrozenBundle(const Sys& sys) : sys_(&sys) {
    for (int k = 0; k < P; ++k) p_(k) = D::variable(sys.params()(k), k);
  }

  static Vec<Sys> values(const State& y) {
    Vec<Sys> v;
    for (int i = 0; i < m; ++i) v(i) = y(i).v;
    return v;
  }
  static Sens<Sys> tangents(const State& y) {
    Sens<Sys> s;
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < P; ++k) s(i, k) = y(i).d[static_cast<std::size_t>(k)];
    return s;
  }

  State eval(double t, const State& y) const { return sys_->template rhs<D>(D(t), y, p_); }
  void linearize(double t, const State& y) {
    // J and f_t as functions of p through y and p.
    const CoupledLinearization<Sys> lin = coupled_linearize(*sys_, t, values(y), tangents(y));
    for (int i = 0; i < m; ++i) {
      f_t_(i) = D(lin.f_t(i));
      for (int k = 0; k < P; ++k) f_t_(i).d[static_cast<std::size_t>(k)] = lin.g_t(i, k);
      for (int j = 0; j < m; ++j) {
        jac_(i, j) = D(lin.jac(i, j));
        for (int k = 0; k < P; ++k)
          jac_(i, j).d[static_cast<std::size_t>(k)] = lin.dg_dy[static_cast<std::size_t>(j)](i, k);
      }
    }
  }
  void factor(double gamma_h) {
    w_ = SmallMat<D, m, m>::Identity() - gamma_h * jac_;
    Mat<Sys> w0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) w0(i, j) = w_(i, j).v;
    lu_.compute(w0);
  }
  // x = W^{-1} r with tangents from the implicit-function rule
  // dx = W^{-1} (dr - dW x).
  State solve(const State& r) const {
    const Vec<Sys> x0 = lu_.solve(values(r));
    Sens<Sys> rhs = tangents(r);
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < P; ++k) {
        double s = 0.0;
        for (int j = 0; j < m; ++j) s += w_(i, j).d[static_cast<std::size_t>(k)] * x0(j);
        rhs(i, k) -= s;
      }
    const Sens<Sys> dx = lu_.solve(rhs);
    State x;
    for (int i = 0; i < m; ++i) {
      x(i) = D(x0(i));
      for (int k = 0; k < P; ++k) x(i).d[static_cast<std::size_t>(k)] = dx(i, k);
    }
    return x;
  }
  State apply_jacobian(const State& k) const {
    State out;
    for (int i = 0; i < m; ++i) {
      D s(0.0);
      for (int j = 0; j < m; ++j) s += jac_(i, j) * k(j);
      out(i) = s;
    }
    return out;
  }
  const State& time_derivative() const { return f_t_; }
  static State zero() { return State::Zero(); }

 private:
  const Sys* sys_;
  SmallVec<D, P> p_;
  SmallMat<D, m, m> jac_ = SmallMat<D, m, m>::Zero();
  SmallMat<D, m, m> w_ = SmallMat<D, m, m>::Zero();
  State f_t_ = State::Zero();
  linalg::SmallLu<double, m> lu_;
};

// ---------------------------------------------------------------------------
// stage engine

template <class State>
struct StepCandidates {
  State y_new;
  State y_emb;
  std::optional<State> f_end;  // f at (t + h, y_new) when the scheme is FSAL
};

// One step of both results. `f_start` may carry f(t, y) from the previous
// step. For linearly-implicit schemes the bundle must be linearized at (t, y).
template <class Bundle>
StepCandidates<typename Bundle::State> embedded_step(const SchemeSpec& s, Bundle& bundle, double t,
                                                     const typename Bundle::State& y, double h,
                                                     const typename Bundle::State* f_start = nullptr) {
  using State = typename Bundle::State;
  std::array<State, kMaxStages> k;
  StepCandidates<State> out;
  if (s.linearly_implicit()) bundle.factor(s.gamma[0][0] * h);
  for (int i = 0; i < s.stages; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    State yi = y;
    for (int j = 0; j < i; ++j)
      if (s.a[iu][static_cast<std::size_t>(j)] != 0.0) yi += s.a[iu][static_cast<std::size_t>(j)] * k[static_cast<std::size_t>(j)];
    const State fi = (i == 0 && f_start) ? *f_start : bundle.eval(t + s.c[iu] * h, yi);
    if (s.fsal && i == s.stages - 1) out.f_end = fi;
    State r = h * fi;
    if (s.linearly_implicit()) {
      State acc = Bundle::zero();
      bool any = false;
      for (int j = 0; j < i; ++j)
        if (s.gamma[iu][static_cast<std::size_t>(j)] != 0.0) {
          acc += s.gamma[iu][static_cast<std::size_t>(j)] * k[static_cast<std::size_t>(j)];
          any = true;
        }
      if (any) r += h * bundle.apply_jacobian(acc);
      const double gsum = s.gamma_sum(i);
      if (gsum != 0.0) r += (h * h * gsum) * bundle.time_derivative();
      k[iu] = bundle.solve(r);
    } else {
      k[iu] = r;
    }
  }
  out.y_new = y;
  out.y_emb = y;
  for (int j = 0; j < s.stages; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    if (s.b[ju] != 0.0) out.y_new += s.b[ju] * k[ju];
    if (s.bhat[ju] != 0.0) out.y_emb += s.bhat[ju] * k[ju];
  }
  return out;
}

// ---------------------------------------------------------------------------
// adaptive driver

struct AdaptiveOptions {
  StepController controller;
  ErrorMeasure measure = ErrorMeasure::internal;
  bool coupled = false;
  bool derivative_in_norm = true;  // only read when coupled
  // Step sequence tried first. Kept when every replayed step passes the
  // error test, which makes the result a smooth function of the inputs near
  // the point where the sequence was recorded.
  const std::vector<Substep>* warm_start = nullptr;
};

template <class Sys>
struct AdaptiveResult {
  Vec<Sys> y;
  std::optional<Sens<Sys>> dy_dp;
  IntegrationStats stats;
  std::vector<Substep> steps;
};

namespace detail {

template <class Sys, class M>
void add_components(ScaledRms& norm, const M& hi, const M& lo, const M& ref0, const M& ref1) {
  for (Eigen::Index i = 0; i < hi.size(); ++i)
    norm.add(hi.data()[i], lo.data()[i], ref0.data()[i], ref1.data()[i]);
}

template <class Sys>
double error_norm_primal(const Sys& sys, const AdaptiveOptions& o, double t0, double t1, const Vec<Sys>& y0,
                         const Vec<Sys>& hi, const Vec<Sys>& lo) {
  ScaledRms norm(o.controller.atol, o.controller.rtol);
  if (o.measure == ErrorMeasure::stress) {
    if constexpr (StressImage<Sys>) {
      const VoigtVec<> s_hi = sys.stress_at(t1, hi);
      const VoigtVec<> s_lo = sys.stress_at(t1, lo);
      const VoigtVec<> s_0 = sys.stress_at(t0, y0);
      add_components<Sys>(norm, s_hi, s_lo, s_0, s_hi);
    } else {
      throw std::invalid_argument("stress error measure needs a system with a stress image");
    }
  } else {
    add_components<Sys>(norm, hi, lo, y0, hi);
  }
  return norm.value();
}

template <class Sys>
double error_norm_coupled(const Sys& sys, const AdaptiveOptions& o, double t0, double t1,
                          const typename CoupledBundle<Sys>::State& y0, const typename CoupledBundle<Sys>::State& hi,
                          const typename CoupledBundle<Sys>::State& lo) {
  using B = CoupledBundle<Sys>;
  ScaledRms norm(o.controller.atol, o.controller.rtol);
  if (o.measure == ErrorMeasure::stress) {
    if constexpr (StressImage<Sys>) {
      if (o.derivative_in_norm) {
        const auto [s_hi, c_hi] = sys.stress_tangent_at(t1, B::primal(hi), B::sensitivity(hi));
        const auto [s_lo, c_lo] = sys.stress_tangent_at(t1, B::primal(lo), B::sensitivity(lo));
        const auto [s_0, c_0] = sys.stress_tangent_at(t0, B::primal(y0), B::sensitivity(y0));
        add_components<Sys>(norm, s_hi, s_lo, s_0, s_hi);
        add_components<Sys>(norm, c_hi, c_lo, c_0, c_hi);
      } else {
        const VoigtVec<> s_hi = sys.stress_at(t1, B::primal(hi));
        add_components<Sys>(norm, s_hi, VoigtVec<>(sys.stress_at(t1, B::primal(lo))),
                            VoigtVec<>(sys.stress_at(t0, B::primal(y0))), s_hi);
      }
    } else {
      throw std::invalid_argument("stress error measure needs a system with a stress image");
    }
  } else if (o.derivative_in_norm) {
    add_components<Sys>(norm, hi, lo, y0, hi);
  } else {
    add_components<Sys>(norm, Vec<Sys>(B::primal(hi)), Vec<Sys>(B::primal(lo)), Vec<Sys>(B::primal(y0)),
                        Vec<Sys>(B::primal(hi)));
  }
  return norm.value();
}

template <class Sys, class Bundle, class ErrorFn>
typename Bundle::State run_adaptive(const SchemeSpec& s, const Sys& sys, Bundle& bundle, typename Bundle::State y,
                                    const StepController& ctl, ErrorFn&& error_fn, IntegrationStats& stats,
                                    std::vector<Substep>& steps, const std::vector<Substep>* warm = nullptr) {
  using State = typename Bundle::State;
  const double total = sys.duration();
  const int q = s.controller_order();
  if (warm && !warm->empty() && warm->back().t + warm->back().h == total && warm->front().t == 0.0) {
    State yw = y;
    std::optional<State> fw;
    bool ok = true;
    for (const Substep& st : *warm) {
      if (s.linearly_implicit()) bundle.linearize(st.t, yw);
      try {
        const auto cand = embedded_step(s, bundle, st.t, yw, st.h, fw ? &*fw : nullptr);
        if (!(error_fn(st.t, st.t + st.h, yw, cand.y_new, cand.y_emb) <= 1.0)) {
          ok = false;
          break;
        }
        yw = cand.y_new;
        if (s.fsal) fw = cand.f_end;
      } catch (const linalg::SingularMatrixError&) {
        ok = false;
        break;
      }
    }
    if (ok) {
      steps = *warm;
      stats.substeps = static_cast<int>(steps.size());
      return yw;
    }
  }
  double t = 0.0;
  double h = total;
  bool previous_rejected = false;
  std::optional<State> f_start;
  bool linearized = false;
  while (true) {
    if (stats.substeps >= ctl.max_substeps)
      throw IntegrationError(IntegrationError::Kind::too_many_substeps,
                             "adaptive integration exceeded " + std::to_string(ctl.max_substeps) + " substeps");
    if (h < ctl.min_step_fraction * total)
      throw IntegrationError(IntegrationError::Kind::step_underflow, "adaptive integration step size underflow");
    const double remaining = total - t;
    const bool last = h >= remaining * (1.0 - 1e-12);
    const double step = last ? remaining : h;
    if (s.linearly_implicit() && !linearized) {
      bundle.linearize(t, y);
      linearized = true;
    }
    std::optional<StepCandidates<State>> cand;
    double err = 0.0;
    try {
      cand = embedded_step(s, bundle, t, y, step, f_start ? &*f_start : nullptr);
      err = error_fn(t, t + step, y, cand->y_new, cand->y_emb);
    } catch (const linalg::SingularMatrixError&) {
      err = std::numeric_limits<double>::infinity();
    }
    if (err <= 1.0) {
      steps.push_back({t, step});
      ++stats.substeps;
      y = cand->y_new;
      if (s.fsal) f_start = cand->f_end;
      linearized = false;
      if (last) return y;
      t += step;
      h = ctl.after_accept(step, err, q, previous_rejected);
      previous_rejected = false;
    } else {
      ++stats.rejected;
      h = ctl.after_reject(step, err, q);
      previous_rejected = true;
    }
  }
}

}  // namespace detail

// Integrates y' = f(t, y, p) over [0, sys.duration()] from y0. With
// `coupled`, the sensitivity dy/dp (zero at t = 0) is integrated alongside by
// the same scheme.
template <OdeSystem Sys>
AdaptiveResult<Sys> adaptive_integrate(const SchemeSpec& s, const Sys& sys, const Vec<Sys>& y0,
                                       const AdaptiveOptions& opt) {
  static_assert(Sys::kDim >= 1, "nothing to integrate");
  if (!(sys.duration() > 0.0)) throw std::invalid_argument("adaptive_integrate: duration must be positive");
  AdaptiveResult<Sys> out;
  if (!opt.coupled) {
    PrimalBundle<Sys> bundle(sys);
    out.y = detail::run_adaptive(
        s, sys, bundle, y0, opt.controller,
        [&](double t0, double t1, const Vec<Sys>& a, const Vec<Sys>& hi, const Vec<Sys>& lo) {
          return detail::error_norm_primal(sys, opt, t0, t1, a, hi, lo);
        },
        out.stats, out.steps, opt.warm_start);
  } else {
    using B = CoupledBundle<Sys>;
    B bundle(sys);
    const typename B::State start = B::pack(y0, Sens<Sys>::Zero());
    const typename B::State end = detail::run_adaptive(
        s, sys, bundle, start, opt.controller,
        [&](double t0, double t1, const typename B::State& a, const typename B::State& hi,
            const typename B::State& lo) { return detail::error_norm_coupled(sys, opt, t0, t1, a, hi, lo); },
        out.stats, out.steps, opt.warm_start);
    out.y = B::primal(end);
    out.dy_dp = B::sensitivity(end);
  }
  return out;
}

// Replays recorded steps on the primal state.
template <OdeSystem Sys>
Vec<Sys> frozen_step_primal(const SchemeSpec& s, const Sys& sys, const Vec<Sys>& y0,
                            const std::vector<Substep>& steps) {
  PrimalBundle<Sys> bundle(sys);
  Vec<Sys> y = y0;
  for (const Substep& st : steps) {
    if (s.linearly_implicit()) bundle.linearize(st.t, y);
    y = embedded_step(s, bundle, st.t, y, st.h).y_new;
  }
  return y;
}

// Forward-mode derivative of the frozen-step replay: step sizes are constants.
template <OdeSystem Sys>
std::pair<Vec<Sys>, Sens<Sys>> frozen_step_blackbox_derivative(const SchemeSpec& s, const Sys& sys,
                                                               const Vec<Sys>& y0,
                                                               const std::vector<Substep>& steps) {
  using B = FrozenBundle<Sys>;
  B bundle(sys);
  typename B::State y;
  for (int i = 0; i < Sys::kDim; ++i) y(i) = typename B::D(y0(i));
  for (const Substep& st : steps) {
    if (s.linearly_implicit()) bundle.linearize(st.t, y);
    y = embedded_step(s, bundle, st.t, y, st.h).y_new;
  }
  return {B::values(y), B::tangents(y)};
}

}  // namespace gsmlab::odeint
