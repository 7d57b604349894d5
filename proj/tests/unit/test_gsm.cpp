#include <random>

#include "doctest.h"
#include "gsmlab/gsm/conventional.hpp"
#include "gsmlab/gsm/gsm.hpp"
#include "gsmlab/gsm/linear_elastic.hpp"
#include "gsmlab/gsm/michel_suquet.hpp"
#include "gsmlab/gsm/params_io.hpp"
#include "gsmlab/linalg/eig.hpp"
#include "support/oracles.hpp"

using namespace gsmlab;
using gsm::Partials;

namespace {
const gsm::MichelSuquetParams kParams{};
const gsm::MichelSuquet<> kLaw{kParams};
constexpr Partials kModes[] = {Partials::automatic, Partials::hand};

// Uniaxial strain state that plastifies from a = 0.
oracle::MsState plastic_uniaxial(double exx = 4e-3) {
  oracle::MsState s;
  s.eps = VoigtVec<>::Zero();
  s.eps(0) = exx;
  s.a = SmallVec<double, 7>::Zero();
  return s;
}
}  // namespace

TEST_CASE("stress: origin, purely viscoplastic strain, elastic Lame oracle") {
  for (Partials mode : kModes) {
    CHECK(gsm::stress(kLaw, mode, VoigtVec<>::Zero().eval(), SmallVec<double, 7>::Zero().eval()).norm() == 0.0);
    std::mt19937_64 rng(1);
    auto s = oracle::random_ms_state(rng);
    s.a.head<6>() = s.eps;
    CHECK(gsm::stress(kLaw, mode, s.eps, s.a).norm() == 0.0);
  }
  const double e = 55e9, nu = 0.33;
  const double lam = e * nu / ((1 + nu) * (1 - 2 * nu));
  const double mu = e / (2 * (1 + nu));
  const gsm::LinearElastic el(e, nu);
  VoigtVec<> eps = VoigtVec<>::Zero();
  eps(0) = 1e-4;
  for (Partials mode : kModes) {
    const VoigtVec<> sig = gsm::stress(el, mode, eps, SmallVec<double, 0>());
    CHECK(sig(0) == doctest::Approx((lam + 2 * mu) * 1e-4).epsilon(1e-14));
    CHECK(sig(1) == doctest::Approx(lam * 1e-4).epsilon(1e-14));
    CHECK(sig(2) == doctest::Approx(lam * 1e-4).epsilon(1e-14));
    CHECK(sig.tail<3>().norm() == 0.0);
  }
}

TEST_CASE("generalized_stress: zero internal state and tensor oracle") {
  std::mt19937_64 rng(2);
  for (Partials mode : kModes) {
    const auto z = gsm::generalized_stress(kLaw, mode, VoigtVec<>::Zero().eval(), SmallVec<double, 7>::Zero().eval());
    CHECK(z.head<6>().norm() == 0.0);
    CHECK(z(6) == -kParams.yield_stress);
    auto s = oracle::random_ms_state(rng);
    s.a.setZero();
    const auto a0 = gsm::generalized_stress(kLaw, mode, s.eps, s.a);
    const VoigtVec<> sig = gsm::stress(kLaw, mode, s.eps, s.a);
    CHECK(oracle::rel_err(a0.head<6>(), sig) < 1e-14);
    CHECK(a0(6) == -kParams.yield_stress);
  }
  for (int k = 0; k < 200; ++k) {
    const auto s = oracle::random_ms_state(rng);
    const auto want = oracle::ms_generalized_stress(kParams, s);
    for (Partials mode : kModes) CHECK(oracle::rel_err(gsm::generalized_stress(kLaw, mode, s.eps, s.a), want) < 1e-12);
  }
}

TEST_CASE("evolution_rhs: elastic domain and closed-form flow rule") {
  for (Partials mode : kModes) {
    CHECK(gsm::evolution_rhs(kLaw, mode, VoigtVec<>::Zero().eval(), SmallVec<double, 7>::Zero().eval()).norm() == 0.0);
    const auto small = plastic_uniaxial(1e-4);
    CHECK(gsm::evolution_rhs(kLaw, mode, small.eps, small.a).norm() == 0.0);
    const auto big = plastic_uniaxial(4e-3);
    const auto f = gsm::evolution_rhs(kLaw, mode, big.eps, big.a);
    const auto want = oracle::ms_flow(kParams, oracle::ms_generalized_stress(kParams, big));
    CHECK(want(6) > 0.0);
    CHECK(oracle::rel_err(f, want) < 1e-10);
  }
  std::mt19937_64 rng(3);
  for (int k = 0; k < 200; ++k) {
    const auto s = oracle::random_ms_state(rng);
    const auto want = oracle::ms_flow(kParams, oracle::ms_generalized_stress(kParams, s));
    for (Partials mode : kModes) {
      const auto f = gsm::evolution_rhs(kLaw, mode, s.eps, s.a);
      CHECK(oracle::rel_err(f, want) < 1e-10);
      CHECK(std::abs(f(0) + f(1) + f(2)) <= 1e-12 * std::max(f.head<6>().norm(), 1e-300));
    }
  }
}

TEST_CASE("automatic and hand partials agree pointwise at 1000 states") {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 1000; ++k) {
    const auto s = oracle::random_ms_state(rng, k % 2 ? 4e-3 : 4e-4);
    const auto sa = gsm::stress(kLaw, Partials::automatic, s.eps, s.a);
    const auto sh = gsm::stress(kLaw, Partials::hand, s.eps, s.a);
    CHECK(oracle::rel_err(sa, sh, 1.0) < 1e-12);
    const auto ga = gsm::generalized_stress(kLaw, Partials::automatic, s.eps, s.a);
    const auto gh = gsm::generalized_stress(kLaw, Partials::hand, s.eps, s.a);
    CHECK(oracle::rel_err(ga, gh) < 1e-12);
    const auto fa = gsm::evolution_rhs(kLaw, Partials::automatic, s.eps, s.a);
    const auto fh = gsm::evolution_rhs(kLaw, Partials::hand, s.eps, s.a);
    CHECK(oracle::rel_err(fa, fh) < 1e-12);
  }
}

TEST_CASE("rhs_jacobian: elastic zero, finite differences, spectrum in the left half plane") {
  for (Partials mode : kModes) {
    const auto el = plastic_uniaxial(1e-4);
    CHECK(gsm::rhs_jacobian(kLaw, mode, el.eps, el.a).norm() == 0.0);
    CHECK(gsm::rhs_strain_jacobian(kLaw, mode, el.eps, el.a).norm() == 0.0);
  }
  std::mt19937_64 rng(5);
  int plastic = 0;
  for (int k = 0; k < 200; ++k) {
    const auto s = oracle::random_ms_state(rng);
    Eigen::VectorXd a = s.a;
    const Eigen::VectorXd ha = (a.cwiseAbs().array().max(1e-3) * 1e-6).matrix();
    auto f_of_a = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
      return gsm::evolution_rhs(kLaw, Partials::hand, s.eps, SmallVec<double, 7>(x));
    };
    Eigen::VectorXd e = s.eps;
    const Eigen::VectorXd he = (e.cwiseAbs().array().max(1e-3) * 1e-6).matrix();
    auto f_of_e = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
      return gsm::evolution_rhs(kLaw, Partials::hand, VoigtVec<>(x), s.a);
    };
    const Eigen::MatrixXd ja_fd = oracle::fd_jacobian(f_of_a, a, ha);
    const Eigen::MatrixXd je_fd = oracle::fd_jacobian(f_of_e, e, he);
    if (gsm::evolution_rhs(kLaw, Partials::hand, s.eps, s.a)(6) > 0.0) ++plastic;
    for (Partials mode : kModes) {
      const Eigen::MatrixXd ja = gsm::rhs_jacobian(kLaw, mode, s.eps, s.a);
      const Eigen::MatrixXd je = gsm::rhs_strain_jacobian(kLaw, mode, s.eps, s.a);
      CHECK(oracle::rel_err(ja, ja_fd) < 1e-5);
      CHECK(oracle::rel_err(je, je_fd) < 1e-5);
      const Eigen::VectorXd ev = linalg::eig_real_parts(ja);
      CHECK(ev.maxCoeff() <= 1e-8 * ja.norm());
    }
  }
  CHECK(plastic > 150);
}

TEST_CASE("convexity witnesses of both potentials") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const auto x = oracle::random_ms_state(rng);
    const auto y = oracle::random_ms_state(rng);
    const VoigtVec<> em = 0.5 * (x.eps + y.eps);
    const SmallVec<double, 7> am = 0.5 * (x.a + y.a);
    const double wx = kLaw.omega(x.eps, x.a), wy = kLaw.omega(y.eps, y.a);
    CHECK(kLaw.omega(em, am) <= 0.5 * (wx + wy) + 1e-12 * std::max(std::abs(wx), std::abs(wy)));
    SmallVec<double, 7> ax, ay;
    for (int i = 0; i < 7; ++i) {
      ax(i) = 1.5e8 * u(rng);
      ay(i) = 1.5e8 * u(rng);
    }
    const double px = kLaw.psi(ax), py = kLaw.psi(ay);
    const SmallVec<double, 7> mid = 0.5 * (ax + ay);
    CHECK(kLaw.psi(mid) <= 0.5 * (px + py) + 1e-12 * std::max(std::abs(px), std::abs(py)) + 1e-300);
  }
}

TEST_CASE("second-order forward types are refused by the automatic path") {
  using D2 = ad::Dual2<double, 2, 2>;
  const VoigtVec<D2> e = VoigtVec<>::Zero().cast<D2>();
  const SmallVec<D2, 7> a = SmallVec<double, 7>::Zero().cast<D2>();
  CHECK_THROWS_AS(gsm::evolution_rhs(kLaw, Partials::automatic, e, a), std::logic_error);
  CHECK_NOTHROW(gsm::evolution_rhs(kLaw, Partials::hand, e, a));
}

TEST_CASE("conventional_evaluate: elastic step, zero time increment") {
  const SmallVec<double, 7> a0 = SmallVec<double, 7>::Zero();
  VoigtVec<> eps = VoigtVec<>::Zero();
  eps(0) = 1e-4;
  const auto el = gsm::conventional_evaluate(kParams, VoigtVec<>::Zero(), a0, eps, 0.1, true);
  CHECK(el.state == a0);
  CHECK(oracle::rel_err(el.stress, kLaw.elastic_stiffness() * eps) < 1e-15);
  CHECK(*el.tangent == kLaw.elastic_stiffness());
  eps(0) = 5e-3;
  const auto zero = gsm::conventional_evaluate(kParams, VoigtVec<>::Zero(), a0, eps, 0.0, false);
  CHECK(zero.state == a0);
}

TEST_CASE("conventional_evaluate: residual, deviatoric update, tangent against differences") {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 100; ++k) {
    const auto s = oracle::random_ms_state(rng);
    const double h = 0.01 * (k + 1);
    const auto r = gsm::conventional_evaluate(kParams, VoigtVec<>::Zero(), s.a, s.eps, h, true);
    // backward Euler residual
    const SmallVec<double, 7> f = gsm::evolution_rhs(kLaw, Partials::hand, s.eps, r.state);
    const SmallVec<double, 7> res = r.state - s.a - h * f;
    CHECK(res.norm() <= 1e-10 * std::max((r.state - s.a).norm(), 1e-12));
    const SmallVec<double, 7> da = r.state - s.a;
    CHECK(std::abs(da(0) + da(1) + da(2)) <= 1e-10 * std::max(da.head<6>().norm(), 1e-300));
    CHECK(da(6) >= 0.0);
    auto sig_of = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
      return gsm::conventional_evaluate(kParams, VoigtVec<>::Zero(), s.a, VoigtVec<>(x), h, false).stress;
    };
    const Eigen::VectorXd e = s.eps;
    const Eigen::MatrixXd c_fd = oracle::fd_jacobian(sig_of, e, Eigen::VectorXd::Constant(6, 1e-9));
    CHECK(oracle::rel_err(*r.tangent, c_fd) < 1e-5);
  }
}

TEST_CASE("params_io: keys, defaults, unknown keys, validation") {
  const auto kv = io::KeyValueFile::parse("E = 70e9 # aluminium\nnu=0.3\nsigma_Y = inf\n");
  const auto p = gsm::params_from_keyvalue(kv);
  CHECK(p.young == 70e9);
  CHECK(p.poisson == 0.3);
  CHECK(std::isinf(p.yield_stress));
  CHECK(p.hardening == kParams.hardening);
  CHECK_THROWS_AS(gsm::params_from_keyvalue(io::KeyValueFile::parse("Young = 1\n")), io::ConfigError);
  CHECK_THROWS_AS(gsm::params_from_keyvalue(io::KeyValueFile::parse("nu = 0.5\n")), io::ConfigError);
  CHECK_THROWS_AS(io::KeyValueFile::parse("E = 1\nE = 2\n"), io::ConfigError);
}
