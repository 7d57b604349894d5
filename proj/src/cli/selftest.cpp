#include "gsmlab/cli/selftest.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "gsmlab/evaluator/batch.hpp"
#include "gsmlab/evaluator/evaluator.hpp"
#include "gsmlab/homogenize/green.hpp"
#include "gsmlab/homogenize/loading.hpp"
#include "gsmlab/homogenize/solver.hpp"
#include "gsmlab/linalg/eig.hpp"
#include "gsmlab/odeint/embedded.hpp"
#include "gsmlab/odeint/system.hpp"

namespace gsmlab::cli {

namespace {

using Law = gsm::MichelSuquet<>;

struct State {
  VoigtVec<> eps;
  SmallVec<double, 7> a;
};

State random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  State s;
  for (int i = 0; i < 6; ++i) s.eps(i) = 4e-3 * u(rng);
  for (int i = 0; i < 6; ++i) s.a(i) = 2e-3 * u(rng);
  const double mean = s.a.head<3>().sum() / 3.0;
  s.a.head<3>().array() -= mean;
  s.a(6) = 4e-3 * (1.0 + u(rng));
  return s;
}

double rel(const Eigen::MatrixXd& got, const Eigen::MatrixXd& want) {
  const double scale = want.cwiseAbs().maxCoeff();
  return scale == 0.0 ? got.cwiseAbs().maxCoeff() : (got - want).cwiseAbs().maxCoeff() / scale;
}

SelftestResult check(std::string name, double worst, double bound) {
  std::ostringstream d;
  d << "worst " << worst << " (bound " << bound << ")";
  return {std::move(name), worst <= bound, d.str()};
}

SelftestResult partials(std::mt19937_64& rng) {
  const Law law{gsm::MichelSuquetParams{}};
  double worst_fd = 0.0, worst_hand = 0.0;
  for (int k = 0; k < 200; ++k) {
    const State s = random_state(rng);
    // stress against central differences of the free energy
    VoigtVec<> fd;
    for (int i = 0; i < 6; ++i) {
      const double h = 1e-6 * std::max(std::abs(s.eps(i)), 1e-3);
      VoigtVec<> p = s.eps, m = s.eps;
      p(i) += h;
      m(i) -= h;
      fd(i) = (law.omega(p, s.a) - law.omega(m, s.a)) / (2.0 * h);
    }
    const VoigtVec<> sa = gsm::stress(law, gsm::Partials::automatic, s.eps, s.a);
    const VoigtVec<> sh = gsm::stress(law, gsm::Partials::hand, s.eps, s.a);
    worst_fd = std::max(worst_fd, rel(sa, fd));
    worst_hand = std::max(worst_hand, rel(sa, sh));
  }
  SelftestResult r = check("automatic stress vs central differences", worst_fd, 1e-6);
  const SelftestResult h = check("hand partials", worst_hand, 1e-12);
  r.passed = r.passed && h.passed;
  r.detail += "; hand partials " + h.detail;
  return r;
}

SelftestResult spectrum(std::mt19937_64& rng) {
  const Law law{gsm::MichelSuquetParams{}};
  double worst = -1.0;
  for (int k = 0; k < 200; ++k) {
    const State s = random_state(rng);
    const Eigen::MatrixXd j = gsm::rhs_jacobian(law, gsm::Partials::hand, s.eps, s.a);
    const double norm = j.norm();
    if (norm == 0.0) continue;
    worst = std::max(worst, linalg::eig_real_parts(j).maxCoeff() / norm);
  }
  return check("evolution Jacobian spectrum in the closed left half plane", worst, 1e-8);
}

evaluator::EvalRequest plastic_request(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.5e-3, 1.5e-3);
  const State s = random_state(rng);
  evaluator::EvalRequest r;
  r.eps_n = s.eps;
  r.a_n = s.a;
  for (int i = 0; i < 6; ++i) r.eps_np1(i) = s.eps(i) + u(rng);
  r.dt = 0.5;
  r.want_tangent = true;
  return r;
}

SelftestResult strategies(std::mt19937_64& rng) {
  const auto mat = evaluator::make_michel_suquet("matrix", {});
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const auto req = plastic_request(rng);
    evaluator::StrategyConfig conv, aut, semi;
    conv.strategy = evaluator::Strategy::conventional;
    aut.strategy = evaluator::Strategy::automatic;
    const auto rc = mat->evaluate(conv, req);
    for (const auto& c : {aut, semi}) {
      const auto r = mat->evaluate(c, req);
      worst = std::max(worst, rel(r.stress, rc.stress));
    }
  }
  return check("conventional, automatic and semi-automatic implicit Euler agree", worst, 1e-10);
}

SelftestResult coupled_vs_frozen(std::mt19937_64& rng) {
  const Law law{gsm::MichelSuquetParams{}};
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const auto req = plastic_request(rng);
    const odeint::GsmSystem<Law> sys(law, gsm::Partials::hand, req.eps_n, req.eps_np1, req.dt);
    for (auto which : {odeint::Integrator::ode12, odeint::Integrator::ode23, odeint::Integrator::ode23s}) {
      odeint::AdaptiveOptions o;
      o.coupled = true;
      const auto r = odeint::adaptive_integrate(odeint::scheme(which), sys, SmallVec<double, 7>(req.a_n), o);
      const auto frozen =
          odeint::frozen_step_blackbox_derivative(odeint::scheme(which), sys, SmallVec<double, 7>(req.a_n), r.steps);
      worst = std::max(worst, rel(frozen.second, *r.dy_dp));
    }
  }
  return check("coupled tangent equals the frozen-step derivative", worst, 1e-9);
}

SelftestResult homogeneous(int threads) {
  const homogenize::GridDims d{4, 4, 4};
  evaluator::ThreadPool pool(threads);
  auto mat = evaluator::make_michel_suquet("matrix", {});
  homogenize::VoxelGrid g = homogenize::VoxelGrid::make(d, {mat}, std::vector<std::uint16_t>(d.size(), 0));
  homogenize::BasicScheme scheme(d, pool);
  const auto r = scheme.solve(g, {}, 1.0, homogenize::MacroLoad::strain_only((VoigtVec<>() << 3e-3, 0, 0, 0, 0, 0).finished()),
                              homogenize::elastic_reference(g), homogenize::VoigtField::Zero(6, 64));
  return {"homogeneous grid converges in one iteration", r.iterations == 1,
          "iterations " + std::to_string(r.iterations)};
}

SelftestResult laminate(int threads) {
  const homogenize::GridDims d{16, 1, 1};
  evaluator::ThreadPool pool(threads);
  std::vector<std::uint16_t> ids(16, 0);
  for (int x = 0; x < 8; ++x) ids[static_cast<std::size_t>(x)] = 1;
  auto soft = evaluator::make_linear_elastic("soft", 70e9, 0.3);
  auto stiff = evaluator::make_linear_elastic("stiff", 300e9, 0.25);
  homogenize::VoxelGrid g = homogenize::VoxelGrid::make(d, {soft, stiff}, ids);
  homogenize::BasicScheme scheme(d, pool);
  const auto r = scheme.solve(g, {}, 1.0, homogenize::MacroLoad::strain_only((VoigtVec<>() << 1e-3, 0, 0, 0, 0, 0).finished()),
                              homogenize::elastic_reference(g), homogenize::VoigtField::Zero(6, 16));
  const double m1 = soft->elastic_stiffness()(0, 0), m2 = stiff->elastic_stiffness()(0, 0);
  const double want = 1e-3 / (0.5 / m1 + 0.5 / m2);
  return check("laminate normal stress matches the layer formula", std::abs(r.mean_stress(0) - want) / want, 1e-2);
}

SelftestResult batch_determinism(std::mt19937_64& rng, int threads) {
  auto mat = evaluator::make_michel_suquet("matrix", {});
  std::vector<evaluator::EvalRequest> req;
  for (int k = 0; k < 64; ++k) req.push_back(plastic_request(rng));
  evaluator::MaterialField field{{mat}, std::vector<std::uint16_t>(req.size(), 0)};
  evaluator::StrategyConfig cfg;
  cfg.integrator = odeint::Integrator::ode23;
  evaluator::ThreadPool one(1), many(std::max(threads, 4));
  const auto a = evaluator::evaluate_batch(field, cfg, req, one, 1);
  const auto b = evaluator::evaluate_batch(field, cfg, req, many, 7);
  bool same = a.ok() && b.ok();
  for (std::size_t i = 0; same && i < req.size(); ++i)
    same = a.results[i].stress == b.results[i].stress && *a.results[i].tangent == *b.results[i].tangent;
  return {"batch results independent of threads and chunking", same, same ? "bitwise equal" : "results differ"};
}

}  // namespace

std::vector<SelftestResult> run_selftest(std::uint64_t seed, int threads) {
  std::mt19937_64 rng(seed);
  std::vector<SelftestResult> out;
  const std::vector<std::function<SelftestResult()>> suites{
      [&] { return partials(rng); },          [&] { return spectrum(rng); },
      [&] { return strategies(rng); },        [&] { return coupled_vs_frozen(rng); },
      [&] { return homogeneous(threads); },   [&] { return laminate(threads); },
      [&] { return batch_determinism(rng, threads); }};
  for (const auto& suite : suites) {
    try {
      out.push_back(suite());
    } catch (const std::exception& e) {
      out.push_back({"suite raised", false, e.what()});
    }
  }
  return out;
}

void print_selftest(std::ostream& out, const std::vector<SelftestResult>& results) {
  for (const auto& r : results) out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
}

}  // namespace gsmlab::cli
