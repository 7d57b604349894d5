#pragma once

// Backward Euler: a single step over the whole interval (the classical
// material-law update) and a step-size-controlled variant with the error
// estimate h/2 |f_{k+1} - f_k|.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "gsmlab/linalg/lu.hpp"
#include "gsmlab/odeint/controller.hpp"
#include "gsmlab/odeint/system.hpp"

namespace gsmlab::odeint {

struct NewtonOptions {
  ErrorMeasure convergence = ErrorMeasure::internal;  // test on the state or on the induced stress
  double tolerance = 1e-10;
  int max_iterations = 50;
  int max_growth = 5;  // consecutive residual increases before giving up
  double atol = 1e-6;  // scaling of the state norms
  double rtol = 1e-3;
};

template <class Sys>
struct ImplicitEulerResult {
  Vec<Sys> y;
  std::optional<Sens<Sys>> dy_dp;
  IntegrationStats stats;
  std::vector<Substep> steps;
};

namespace detail {

template <class Sys>
double scaled_norm(const Vec<Sys>& d, const Vec<Sys>& ref, const NewtonOptions& o) {
  double s = 0.0;
  for (int i = 0; i < Sys::kDim; ++i) {
    const double r = d(i) / (o.atol + o.rtol * std::abs(ref(i)));
    s += r * r;
  }
  return std::sqrt(s / Sys::kDim);
}

// Solves y = y0 + h f(t1, y) by damped Newton from y0. Returns the solution and
// the Jacobian df/dy at it.
template <class Sys>
std::pair<Vec<Sys>, Mat<Sys>> newton_backward_euler(const Sys& sys, double t1, const Vec<Sys>& y0, double h,
                                                    const NewtonOptions& o, int& iterations) {
  Vec<Sys> y = y0;
  Linearization<Sys> lin = linearize(sys, t1, y);
  Vec<Sys> res = y - y0 - h * lin.f;
  double res_norm = scaled_norm<Sys>(res, y, o);
  std::vector<double> history{res_norm};
  int growth = 0;
  for (int it = 0;; ++it) {
    if (res_norm == 0.0) return {y, lin.jac};
    if (it >= o.max_iterations)
      throw IntegrationError(IntegrationError::Kind::newton_max_iterations,
                             "implicit Euler: Newton did not converge in " + std::to_string(o.max_iterations) +
                                 " iterations",
                             history);
    const linalg::SmallLu<double, Sys::kDim> lu(Mat<Sys>::Identity() - h * lin.jac);
    const Vec<Sys> dy = -lu.solve(res);
    ++iterations;

    // Backtracking on the residual.
    double lambda = 1.0;
    Vec<Sys> y_try;
    Linearization<Sys> lin_try;
    Vec<Sys> res_try;
    double norm_try = 0.0;
    for (int ls = 0; ls < 12; ++ls) {
      y_try = y + lambda * dy;
      lin_try = linearize(sys, t1, y_try);
      res_try = y_try - y0 - h * lin_try.f;
      norm_try = scaled_norm<Sys>(res_try, y_try, o);
      if (norm_try <= res_norm || !std::isfinite(res_norm)) break;
      lambda *= 0.5;
    }
    if (!std::isfinite(norm_try))
      throw IntegrationError(IntegrationError::Kind::newton_diverged, "implicit Euler: non-finite residual", history);

    const Vec<Sys> step = y_try - y;
    bool converged = false;
    if (o.convergence == ErrorMeasure::stress) {
      if constexpr (StressImage<Sys>) {
        const VoigtVec<> s_new = sys.stress_at(t1, y_try);
        const VoigtVec<> ds = s_new - sys.stress_at(t1, y);
        converged = ds.norm() <= o.tolerance * s_new.norm();
      } else {
        throw std::invalid_argument("stress convergence test needs a system with a stress image");
      }
    } else {
      converged = scaled_norm<Sys>(step, y_try, o) <= o.tolerance;
    }
    // Increments at the round-off floor of the state count as converged.
    converged = converged ||
                step.cwiseAbs().maxCoeff() <= 4.0 * std::numeric_limits<double>::epsilon() * y_try.cwiseAbs().maxCoeff();

    growth = norm_try > res_norm ? growth + 1 : 0;
    y = y_try;
    lin = lin_try;
    res = res_try;
    res_norm = norm_try;
    history.push_back(res_norm);
    if (converged) return {y, lin.jac};
    if (growth >= o.max_growth)
      throw IntegrationError(IntegrationError::Kind::newton_diverged, "implicit Euler: residual grew " +
                                                                          std::to_string(o.max_growth) +
                                                                          " times in a row",
                             history);
  }
}

// Sensitivity update (I - h J) dy1 = dy0 + h df/dp(t1, y1).
template <class Sys>
Sens<Sys> backward_euler_sensitivity(const Sys& sys, double t1, const Vec<Sys>& y1, const Mat<Sys>& jac, double h,
                                     const Sens<Sys>& dy0) {
  const Sens<Sys> fp = coupled_rhs(sys, t1, y1, Sens<Sys>::Zero()).second;
  const linalg::SmallLu<double, Sys::kDim> lu(Mat<Sys>::Identity() - h * jac);
  return lu.solve(Sens<Sys>(dy0 + h * fp));
}

}  // namespace detail

// One backward-Euler step over [0, duration]. With `want_sensitivity` the six
// (kParams) additional linear solves give dy/dp at the converged state.
template <OdeSystem Sys>
ImplicitEulerResult<Sys> implicit_euler_step(const Sys& sys, const Vec<Sys>& y0, bool want_sensitivity,
                                             const NewtonOptions& opt = {}) {
  const double h = sys.duration();
  if (!(h > 0.0)) throw std::invalid_argument("implicit_euler_step: duration must be positive");
  ImplicitEulerResult<Sys> out;
  auto [y, jac] = detail::newton_backward_euler(sys, h, y0, h, opt, out.stats.newton_iterations);
  out.y = y;
  out.stats.substeps = 1;
  out.steps.push_back({0.0, h});
  if (want_sensitivity) out.dy_dp = detail::backward_euler_sensitivity(sys, h, y, jac, h, Sens<Sys>::Zero());
  return out;
}

// Backward Euler with step-size control. The local error of step k is
// estimated by h/2 (f_{k+1} - f_k) (and the same for the sensitivity rates when
// they are included).
template <OdeSystem Sys>
ImplicitEulerResult<Sys> implicit_euler_adaptive(const Sys& sys, const Vec<Sys>& y0, bool want_sensitivity,
                                                 const StepController& ctl, const NewtonOptions& opt = {},
                                                 bool derivative_in_norm = true) {
  const double total = sys.duration();
  if (!(total > 0.0)) throw std::invalid_argument("implicit_euler_adaptive: duration must be positive");
  constexpr int q = 1;
  ImplicitEulerResult<Sys> out;
  Vec<Sys> y = y0;
  Sens<Sys> dy = Sens<Sys>::Zero();
  double t = 0.0;
  double h = total;
  bool previous_rejected = false;
  auto rates = [&](double tt, const Vec<Sys>& yy, const Sens<Sys>& dd) {
    return want_sensitivity ? coupled_rhs(sys, tt, yy, dd) : std::pair{rhs(sys, tt, yy), Sens<Sys>::Zero().eval()};
  };
  auto [f0, g0] = rates(t, y, dy);
  while (true) {
    if (out.stats.substeps >= ctl.max_substeps)
      throw IntegrationError(IntegrationError::Kind::too_many_substeps,
                             "adaptive implicit Euler exceeded " + std::to_string(ctl.max_substeps) + " substeps");
    if (h < ctl.min_step_fraction * total)
      throw IntegrationError(IntegrationError::Kind::step_underflow, "adaptive implicit Euler step size underflow");
    const double remaining = total - t;
    const bool last = h >= remaining * (1.0 - 1e-12);
    const double step = last ? remaining : h;
    const double t1 = last ? total : t + step;

    double err = std::numeric_limits<double>::infinity();
    Vec<Sys> y1;
    Sens<Sys> dy1 = Sens<Sys>::Zero();
    Vec<Sys> f1;
    Sens<Sys> g1 = Sens<Sys>::Zero();
    try {
      auto [ys, jac] = detail::newton_backward_euler(sys, t1, y, step, opt, out.stats.newton_iterations);
      y1 = ys;
      if (want_sensitivity) dy1 = detail::backward_euler_sensitivity(sys, t1, y1, jac, step, dy);
      std::tie(f1, g1) = rates(t1, y1, dy1);
      ScaledRms norm(ctl.atol, ctl.rtol);
      for (int i = 0; i < Sys::kDim; ++i) norm.add(0.5 * step * (f1(i) - f0(i)), 0.0, y(i), y1(i));
      if (want_sensitivity && derivative_in_norm)
        for (Eigen::Index i = 0; i < dy.size(); ++i)
          norm.add(0.5 * step * (g1.data()[i] - g0.data()[i]), 0.0, dy.data()[i], dy1.data()[i]);
      err = norm.value();
    } catch (const IntegrationError&) {
    } catch (const linalg::SingularMatrixError&) {
    }
    if (err <= 1.0) {
      out.steps.push_back({t, step});
      ++out.stats.substeps;
      y = y1;
      dy = dy1;
      f0 = f1;
      g0 = g1;
      if (last) break;
      t = t1;
      h = ctl.after_accept(step, err, q, previous_rejected);
      previous_rejected = false;
    } else {
      ++out.stats.rejected;
      h = ctl.after_reject(step, err, q);
      previous_rejected = true;
    }
  }
  out.y = y;
  if (want_sensitivity) out.dy_dp = dy;
  return out;
}

// Backward Euler with `count` equal substeps, without error control.
template <OdeSystem Sys>
ImplicitEulerResult<Sys> implicit_euler_fixed(const Sys& sys, const Vec<Sys>& y0, int count, bool want_sensitivity,
                                              const NewtonOptions& opt = {}) {
  if (count < 1) throw std::invalid_argument("implicit_euler_fixed: need at least one substep");
  const double total = sys.duration();
  if (!(total > 0.0)) throw std::invalid_argument("implicit_euler_fixed: duration must be positive");
  ImplicitEulerResult<Sys> out;
  Vec<Sys> y = y0;
  Sens<Sys> dy = Sens<Sys>::Zero();
  const double h = total / count;
  for (int k = 0; k < count; ++k) {
    const double t1 = k + 1 == count ? total : (k + 1) * h;
    auto [ys, jac] = detail::newton_backward_euler(sys, t1, y, h, opt, out.stats.newton_iterations);
    if (want_sensitivity) dy = detail::backward_euler_sensitivity(sys, t1, ys, jac, h, dy);
    y = ys;
    ++out.stats.substeps;
  }
  out.y = y;
  if (want_sensitivity) out.dy_dp = dy;
  return out;
}

}  // namespace gsmlab::odeint
