#include <cmath>
#include <random>

#include "doctest.h"
#include "gsmlab/gsm/conventional.hpp"
#include "gsmlab/gsm/michel_suquet.hpp"
#include "gsmlab/linalg/voigt.hpp"
#include "gsmlab/odeint/embedded.hpp"
#include "gsmlab/odeint/implicit_euler.hpp"
#include "gsmlab/odeint/scheme.hpp"
#include "support/oracles.hpp"

using namespace gsmlab;
using namespace gsmlab::odeint;
using gsm::Partials;

namespace {

const gsm::MichelSuquetParams kParams{};
const gsm::MichelSuquet<> kLaw{kParams};
constexpr Integrator kEmbedded[] = {Integrator::ode12, Integrator::ode23, Integrator::ode23s};

// y' = p0 * y + p1 on [0, T].
struct AffineSystem {
  static constexpr int kDim = 1;
  static constexpr int kParams = 2;
  double T = 1.0;
  SmallVec<double, 2> p{1.0, 0.0};
  double duration() const { return T; }
  const SmallVec<double, 2>& params() const { return p; }
  template <class S>
  SmallVec<S, 1> rhs(const S&, const SmallVec<S, 1>& y, const SmallVec<S, 2>& q) const {
    return SmallVec<S, 1>(q(0) * y(0) + q(1));
  }
};

// Two coupled linear equations with a time-dependent forcing.
struct LinearPairSystem {
  static constexpr int kDim = 2;
  static constexpr int kParams = 3;
  SmallVec<double, 3> p{-2.0, 0.5, 1.5};
  double duration() const { return 2.0; }
  const SmallVec<double, 3>& params() const { return p; }
  template <class S>
  SmallVec<S, 2> rhs(const S& t, const SmallVec<S, 2>& y, const SmallVec<S, 3>& q) const {
    return SmallVec<S, 2>(q(0) * y(0) + q(1) * y(1) + t, -q(1) * y(0) - q(2) * y(1));
  }
};

// y' = y^2: the backward Euler equation y = 1 + h y^2 has no real root for h > 1/4.
struct Blowup {
  static constexpr int kDim = 1;
  static constexpr int kParams = 1;
  SmallVec<double, 1> p{1.0};
  double duration() const { return 10.0; }
  const SmallVec<double, 1>& params() const { return p; }
  template <class S>
  SmallVec<S, 1> rhs(const S&, const SmallVec<S, 1>& y, const SmallVec<S, 1>& q) const {
    return SmallVec<S, 1>(q(0) * y(0) * y(0));
  }
};

struct PlasticStep {
  VoigtVec<> eps_n, eps_np1;
  SmallVec<double, 7> a_n;
  double dt;
};

// Uniaxial strain loading from the virgin state, well beyond yield.
PlasticStep uniaxial_step() {
  PlasticStep s;
  s.eps_n = VoigtVec<>::Zero();
  s.eps_np1 = VoigtVec<>::Zero();
  s.eps_np1(0) = 4e-3;
  s.a_n = SmallVec<double, 7>::Zero();
  s.dt = 4e-3 / 1.4e-3;
  return s;
}

PlasticStep random_step(std::mt19937_64& rng) {
  const auto st = oracle::random_ms_state(rng);
  std::uniform_real_distribution<double> u(-1.5e-3, 1.5e-3);
  PlasticStep s;
  s.eps_n = st.eps;
  s.a_n = st.a;
  for (int i = 0; i < 6; ++i) s.eps_np1(i) = st.eps(i) + u(rng);
  s.dt = 0.5;
  return s;
}

GsmSystem<gsm::MichelSuquet<>> system_of(const PlasticStep& s, Partials mode = Partials::hand) {
  return {kLaw, mode, s.eps_n, s.eps_np1, s.dt};
}

AdaptiveOptions coupled_options(bool derivative_in_norm = true) {
  AdaptiveOptions o;
  o.coupled = true;
  o.derivative_in_norm = derivative_in_norm;
  return o;
}

}  // namespace

TEST_CASE("scheme coefficient sets satisfy their order conditions") {
  for (Integrator which : kEmbedded) {
    const SchemeSpec& s = scheme(which);
    CHECK_NOTHROW(verify_order_conditions(s));
    for (int i = 0; i < s.stages; ++i)
      for (int j = i; j < s.stages; ++j) CHECK(s.a[i][j] == 0.0);
  }
  CHECK(scheme(Integrator::ode12).controller_order() == 1);
  CHECK(scheme(Integrator::ode23).controller_order() == 2);
  CHECK(scheme(Integrator::ode23s).controller_order() == 2);
  const double d = 1.0 / (2.0 + std::sqrt(2.0));
  for (int i = 0; i < 3; ++i) CHECK(scheme(Integrator::ode23s).gamma[i][i] == d);
  CHECK_THROWS_AS(scheme(Integrator::implicit_euler), std::invalid_argument);

  SchemeSpec broken = scheme(Integrator::ode23);
  broken.b[0] += 1e-3;
  CHECK_THROWS_AS(verify_order_conditions(broken), std::logic_error);
}

TEST_CASE("integrator names round-trip") {
  for (Integrator w : {Integrator::implicit_euler, Integrator::ode12, Integrator::ode23, Integrator::ode23s})
    CHECK(parse_integrator(to_string(w)) == w);
  CHECK_THROWS(parse_integrator("rk4"));
}

TEST_CASE("embedded step: constant and zero right-hand sides are exact") {
  for (Integrator which : kEmbedded) {
    const SchemeSpec& s = scheme(which);
    AffineSystem sys;
    for (double rate : {0.0, 1.0}) {
      sys.p = {0.0, rate};
      PrimalBundle<AffineSystem> b(sys);
      const SmallVec<double, 1> y0(0.7);
      if (s.linearly_implicit()) b.linearize(0.0, y0);
      const auto c = embedded_step(s, b, 0.0, y0, 0.25);
      CHECK(c.y_new(0) == doctest::Approx(0.7 + 0.25 * rate).epsilon(1e-15));
      CHECK(c.y_emb(0) == doctest::Approx(0.7 + 0.25 * rate).epsilon(1e-15));
      CHECK(std::abs(c.y_new(0) - c.y_emb(0)) <= 1e-15);
    }
  }
}

TEST_CASE("embedded step: Bogacki-Shampine on y' = -y against a hand computation") {
  const double h = 0.1;
  const double k1 = -1.0;
  const double k2 = -(1.0 + 0.5 * h * k1);
  const double k3 = -(1.0 + 0.75 * h * k2);
  const double y3 = 1.0 + h * (2.0 / 9.0 * k1 + 1.0 / 3.0 * k2 + 4.0 / 9.0 * k3);
  const double k4 = -y3;
  const double y2 = 1.0 + h * (7.0 / 24.0 * k1 + 0.25 * k2 + 1.0 / 3.0 * k3 + 0.125 * k4);

  AffineSystem sys;
  sys.p = {-1.0, 0.0};
  PrimalBundle<AffineSystem> b(sys);
  const auto c = embedded_step(scheme(Integrator::ode23), b, 0.0, SmallVec<double, 1>(1.0), h);
  CHECK(std::abs(c.y_new(0) - y3) <= 1e-14);
  CHECK(std::abs(c.y_emb(0) - y2) <= 1e-14);
  REQUIRE(c.f_end.has_value());
  CHECK(std::abs((*c.f_end)(0) + y3) <= 1e-15);
}

TEST_CASE("empirical convergence orders on y' = -y") {
  AffineSystem sys;
  sys.p = {-1.0, 0.0};
  const double exact = std::exp(-1.0);
  auto fixed_steps = [](int n) {
    std::vector<Substep> steps;
    for (int k = 0; k < n; ++k) steps.push_back({k / static_cast<double>(n), 1.0 / n});
    return steps;
  };
  auto observed = [&](auto&& solve) {
    const double e1 = std::abs(solve(40) - exact);
    const double e2 = std::abs(solve(80) - exact);
    return std::log2(e1 / e2);
  };
  const SmallVec<double, 1> y0(1.0);
  for (Integrator which : kEmbedded) {
    const SchemeSpec& s = scheme(which);
    const double high = observed([&](int n) { return frozen_step_primal(s, sys, y0, fixed_steps(n))(0); });
    CHECK(high == doctest::Approx(s.order).epsilon(0.1 / s.order));
    const double low = observed([&](int n) {
      PrimalBundle<AffineSystem> b(sys);
      SmallVec<double, 1> y = y0;
      for (const Substep& st : fixed_steps(n)) {
        if (s.linearly_implicit()) b.linearize(st.t, y);
        y = embedded_step(s, b, st.t, y, st.h).y_emb;
      }
      return y(0);
    });
    CHECK(low == doctest::Approx(s.order_embedded).epsilon(0.1 / s.order_embedded));
  }
  const double ie = observed([&](int n) { return implicit_euler_fixed(sys, y0, n, false).y(0); });
  CHECK(ie == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("adaptive: zero right-hand side takes one step") {
  AffineSystem sys;
  sys.p = {0.0, 0.0};
  for (Integrator which : kEmbedded) {
    const auto r = adaptive_integrate(scheme(which), sys, SmallVec<double, 1>(2.0), coupled_options());
    CHECK(r.y(0) == 2.0);
    CHECK(r.stats.substeps == 1);
    CHECK(r.stats.rejected == 0);
    // At p = 0: dy/dp0 = y0 t, dy/dp1 = t.
    CHECK((*r.dy_dp)(0, 0) == doctest::Approx(2.0));
    CHECK((*r.dy_dp)(0, 1) == doctest::Approx(1.0));
  }
}

TEST_CASE("adaptive: coupled y' = p y reproduces exp(p) and its derivative") {
  AffineSystem sys;
  for (double p : {-2.0, 0.5, 1.0}) {
    sys.p = {p, 0.0};
    const double e = std::exp(p);
    for (Integrator which : kEmbedded) {
      const auto r = adaptive_integrate(scheme(which), sys, SmallVec<double, 1>(1.0), coupled_options());
      const double rtol = 1e-3;
      CHECK(std::abs(r.y(0) - e) <= 10.0 * rtol * e);
      CHECK(std::abs((*r.dy_dp)(0, 0) - e) <= 10.0 * rtol * e);
    }
  }
}

TEST_CASE("step controller: factor bounds and rejection handling") {
  const StepController c;
  CHECK(c.after_accept(1.0, 0.0, 2, false) == 5.0);
  CHECK(c.after_accept(1.0, 1e-12, 2, true) == 1.0);
  CHECK(c.after_accept(1.0, 1.0, 2, false) == doctest::Approx(0.9));
  CHECK(c.after_reject(1.0, 1.5, 2) == 0.5);
  CHECK(c.after_reject(1.0, 1e6, 2) == 0.2);
  CHECK(c.after_reject(1.0, std::numeric_limits<double>::infinity(), 2) == 0.2);
  CHECK(c.after_reject(1.0, std::nan(""), 2) == 0.2);
}

TEST_CASE("error norm: definition examples") {
  using Sys = GsmSystem<gsm::MichelSuquet<>>;
  const PlasticStep st = uniaxial_step();
  const Sys sys = system_of(st);
  AdaptiveOptions o;
  const Vec<Sys> zero = Vec<Sys>::Zero();
  Vec<Sys> a = Vec<Sys>::Constant(1e-3);
  CHECK(detail::error_norm_primal(sys, o, 0.0, 1.0, a, a, a) == 0.0);
  Vec<Sys> lo = zero;
  lo(0) = o.controller.atol;
  CHECK(detail::error_norm_primal(sys, o, 0.0, 1.0, zero, zero, lo) == doctest::Approx(1.0 / std::sqrt(7.0)));

  // Stress mode: sigma is affine in the viscoplastic strain, so the stress
  // difference is -Ce applied to the state difference.
  o.measure = ErrorMeasure::stress;
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s0 = oracle::random_ms_state(rng);
    const auto s1 = oracle::random_ms_state(rng);
    const auto s2 = oracle::random_ms_state(rng);
    const double t1 = 0.7 * st.dt;
    const VoigtVec<> sig_hi = sys.stress_at(t1, s1.a);
    const VoigtVec<> sig_0 = sys.stress_at(0.0, s0.a);
    const VoigtVec<> diff = -kLaw.elastic_stiffness() * (s1.a - s2.a).head<6>();
    ScaledRms want(o.controller.atol, o.controller.rtol);
    for (int i = 0; i < 6; ++i) want.add(diff(i), 0.0, sig_0(i), sig_hi(i));
    CHECK(detail::error_norm_primal(sys, o, 0.0, t1, s0.a, s1.a, s2.a) ==
          doctest::Approx(want.value()).epsilon(1e-9));
  }
}

TEST_CASE("implicit Euler: scalar closed form and elastic step") {
  AffineSystem sys;
  for (double lambda : {0.5, 3.0, 200.0})
    for (double h : {0.01, 1.0}) {
      sys.p = {-lambda, 0.0};
      sys.T = h;
      const auto r = implicit_euler_step(sys, SmallVec<double, 1>(1.0), true);
      CHECK(r.y(0) == doctest::Approx(1.0 / (1.0 + h * lambda)).epsilon(1e-13));
      // d/dp0 of 1/(1 - h p0)
      CHECK((*r.dy_dp)(0, 0) == doctest::Approx(h / std::pow(1.0 + h * lambda, 2)).epsilon(1e-12));
    }

  PlasticStep st = uniaxial_step();
  st.eps_np1(0) = 1e-4;  // stays elastic
  const auto r = implicit_euler_step(system_of(st), st.a_n, true);
  CHECK(r.y == st.a_n);
  CHECK(r.dy_dp->norm() == 0.0);
  CHECK_THROWS_AS(implicit_euler_step(AffineSystem{0.0}, SmallVec<double, 1>(1.0), false), std::invalid_argument);
}

TEST_CASE("implicit Euler agrees with the radial return at machine precision") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const PlasticStep st = trial == 0 ? uniaxial_step() : random_step(rng);
    const auto conv = gsm::conventional_evaluate(kParams, st.eps_n, st.a_n, st.eps_np1, st.dt, true);
    for (Partials mode : {Partials::automatic, Partials::hand}) {
      const auto sys = system_of(st, mode);
      const auto r = implicit_euler_step(sys, st.a_n, true);
      CHECK(oracle::rel_err(r.y, conv.state, 1e-12) <= 1e-10);
      const auto [sig, c] = gsm::stress_with_tangent(kLaw, mode, st.eps_np1, r.y, *r.dy_dp);
      CHECK(oracle::rel_err(sig, conv.stress) <= 1e-10);
      CHECK(oracle::rel_err(c, *conv.tangent) <= 1e-8);
    }
  }
}

TEST_CASE("implicit Euler: stress-converged Newton") {
  const PlasticStep st = uniaxial_step();
  NewtonOptions o;
  o.convergence = ErrorMeasure::stress;
  const auto sys = system_of(st);
  const auto r = implicit_euler_step(sys, st.a_n, false, o);
  const auto conv = gsm::conventional_evaluate(kParams, st.eps_n, st.a_n, st.eps_np1, st.dt, false);
  CHECK(oracle::rel_err(sys.stress_at(st.dt, r.y), conv.stress) <= 1e-9);
}

TEST_CASE("implicit Euler: Newton failure is reported") {
  CHECK_THROWS_AS(implicit_euler_step(Blowup{}, SmallVec<double, 1>(1.0), false), IntegrationError);
}

TEST_CASE("adaptive ode23 on a plastifying step matches a fine implicit Euler reference") {
  const PlasticStep st = uniaxial_step();
  const auto sys = system_of(st);
  const auto ref = implicit_euler_fixed(sys, st.a_n, 100000, false);
  AdaptiveOptions o;
  const auto r = adaptive_integrate(scheme(Integrator::ode23), sys, st.a_n, o);
  const double bound = 5.0 * (o.controller.atol + o.controller.rtol * ref.y.norm());
  CHECK((r.y - ref.y).norm() <= bound);
  CHECK(r.stats.substeps > 1);
}

TEST_CASE("coupled derivative equals the frozen-step derivative and its finite differences") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 12; ++trial) {
    const PlasticStep st = trial == 0 ? uniaxial_step() : random_step(rng);
    for (Integrator which : kEmbedded) {
      const SchemeSpec& s = scheme(which);
      const auto sys = system_of(st);
      const auto r = adaptive_integrate(s, sys, st.a_n, coupled_options());
      const auto [y_frozen, dy_frozen] = frozen_step_blackbox_derivative(s, sys, st.a_n, r.steps);
      CHECK(oracle::rel_err(y_frozen, r.y, 1e-12) <= 1e-12);
      CHECK(oracle::rel_err(dy_frozen, *r.dy_dp, 1e-12) <= 1e-9);

      if (trial < 3) {
        const auto frozen_of = [&](const Eigen::VectorXd& e) {
          const GsmSystem<gsm::MichelSuquet<>> perturbed(kLaw, Partials::hand, st.eps_n, VoigtVec<>(e), st.dt);
          return Eigen::VectorXd(frozen_step_primal(s, perturbed, st.a_n, r.steps));
        };
        const Eigen::MatrixXd fd =
            oracle::fd_jacobian(frozen_of, Eigen::VectorXd(st.eps_np1), Eigen::VectorXd::Constant(6, 1e-8));
        CHECK(oracle::rel_err(*r.dy_dp, fd) <= 1e-5);
      }
    }
  }
}

TEST_CASE("coupled and frozen derivatives agree on linear systems") {
  LinearPairSystem sys;
  const SmallVec<double, 2> y0(1.0, -0.5);
  for (Integrator which : kEmbedded) {
    const SchemeSpec& s = scheme(which);
    const auto r = adaptive_integrate(s, sys, y0, coupled_options());
    const auto [y_frozen, dy_frozen] = frozen_step_blackbox_derivative(s, sys, y0, r.steps);
    CHECK(oracle::rel_err(y_frozen, r.y) <= 1e-12);
    CHECK(oracle::rel_err(dy_frozen, *r.dy_dp) <= 1e-12);
  }
}

TEST_CASE("step sizes do not depend on coupling when derivatives are excluded from the norm") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const PlasticStep st = trial == 0 ? uniaxial_step() : random_step(rng);
    for (Integrator which : kEmbedded) {
      for (ErrorMeasure measure : {ErrorMeasure::internal, ErrorMeasure::stress}) {
        const auto sys = system_of(st);
        AdaptiveOptions plain;
        plain.measure = measure;
        AdaptiveOptions coupled = coupled_options(false);
        coupled.measure = measure;
        const auto a = adaptive_integrate(scheme(which), sys, st.a_n, plain);
        const auto b = adaptive_integrate(scheme(which), sys, st.a_n, coupled);
        REQUIRE(a.steps.size() == b.steps.size());
        for (std::size_t k = 0; k < a.steps.size(); ++k) {
          CHECK(a.steps[k].t == b.steps[k].t);
          CHECK(a.steps[k].h == b.steps[k].h);
        }
        CHECK(a.y == b.y);
      }
    }
  }
}

TEST_CASE("adaptive implicit Euler converges to the coupled reference") {
  const PlasticStep st = uniaxial_step();
  const auto sys = system_of(st);
  StepController tight;
  tight.atol = 1e-12;
  tight.rtol = 1e-9;
  AdaptiveOptions o = coupled_options();
  o.controller = tight;
  const auto ref = adaptive_integrate(scheme(Integrator::ode23), sys, st.a_n, o);
  const auto ie = implicit_euler_adaptive(sys, st.a_n, true, StepController{});
  CHECK(oracle::rel_err(ie.y, ref.y) <= 1e-2);
  CHECK(oracle::rel_err(*ie.dy_dp, *ref.dy_dp) <= 5e-2);
  CHECK(ie.stats.substeps > 1);
}

TEST_CASE("explicit schemes need more substeps for long steps, the Rosenbrock scheme does not") {
  // Plastified state, then a small strain increment over increasingly long steps.
  const PlasticStep load = uniaxial_step();
  const auto pre = implicit_euler_fixed(system_of(load), load.a_n, 200, false);
  auto substeps = [&](Integrator which, double dt) {
    PlasticStep st;
    st.eps_n = load.eps_np1;
    st.a_n = pre.y;
    st.eps_np1 = load.eps_np1;
    st.eps_np1(0) += 1e-4;
    st.dt = dt;
    return adaptive_integrate(scheme(which), system_of(st), st.a_n, AdaptiveOptions{}).stats.substeps;
  };
  const double dts[] = {1.0, 10.0, 100.0};
  for (Integrator which : {Integrator::ode12, Integrator::ode23}) {
    CHECK(substeps(which, dts[0]) < substeps(which, dts[1]));
    CHECK(substeps(which, dts[1]) < substeps(which, dts[2]));
  }
  int worst = 0;
  for (double dt : dts) worst = std::max(worst, substeps(Integrator::ode23s, dt));
  MESSAGE("ode23s substeps (max over step lengths): " << worst);
  CHECK(worst <= 40);
  CHECK(substeps(Integrator::ode23s, dts[2]) < substeps(Integrator::ode23, dts[2]));
}

TEST_CASE("warm start: replaying an accepted sequence reproduces the cold result") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 8; ++trial) {
    const PlasticStep st = trial == 0 ? uniaxial_step() : random_step(rng);
    for (Integrator which : kEmbedded) {
      for (bool coupled : {false, true}) {
        const auto sys = system_of(st);
        AdaptiveOptions o;
        o.coupled = coupled;
        const auto cold = adaptive_integrate(scheme(which), sys, st.a_n, o);
        o.warm_start = &cold.steps;
        const auto warm = adaptive_integrate(scheme(which), sys, st.a_n, o);
        CHECK(warm.y == cold.y);
        if (coupled) CHECK(*warm.dy_dp == *cold.dy_dp);
        REQUIRE(warm.steps.size() == cold.steps.size());
        for (std::size_t k = 0; k < cold.steps.size(); ++k) CHECK(warm.steps[k].h == cold.steps[k].h);
        CHECK(warm.stats.rejected == 0);
      }
    }
  }
}

TEST_CASE("warm start: a too coarse sequence falls back to fresh adaptation") {
  const PlasticStep st = uniaxial_step();
  const auto sys = system_of(st);
  const std::vector<Substep> single{{0.0, st.dt}};
  for (Integrator which : kEmbedded) {
    AdaptiveOptions o;
    const auto cold = adaptive_integrate(scheme(which), sys, st.a_n, o);
    REQUIRE(cold.stats.substeps > 1);
    o.warm_start = &single;
    const auto warm = adaptive_integrate(scheme(which), sys, st.a_n, o);
    CHECK(warm.y == cold.y);
    CHECK(warm.steps.size() == cold.steps.size());
  }
}

TEST_CASE("warm start: a sequence from a neighbouring step keeps the frozen-step derivative") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 6; ++trial) {
    const PlasticStep st = random_step(rng);
    PlasticStep near = st;
    near.eps_np1(0) += 1e-7;
    for (Integrator which : kEmbedded) {
      const SchemeSpec& s = scheme(which);
      const auto seed = adaptive_integrate(s, system_of(near), near.a_n, AdaptiveOptions{});
      AdaptiveOptions o = coupled_options();
      o.warm_start = &seed.steps;
      const auto sys = system_of(st);
      const auto r = adaptive_integrate(s, sys, st.a_n, o);
      const auto [y_frozen, dy_frozen] = frozen_step_blackbox_derivative(s, sys, st.a_n, r.steps);
      CHECK(oracle::rel_err(y_frozen, r.y, 1e-12) <= 1e-12);
      CHECK(oracle::rel_err(dy_frozen, *r.dy_dp, 1e-12) <= 1e-9);
    }
  }
}
