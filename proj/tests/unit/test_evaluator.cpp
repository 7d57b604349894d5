#include <random>

#include "doctest.h"
#include "gsmlab/evaluator/batch.hpp"
#include "gsmlab/evaluator/evaluator.hpp"
#include "support/oracles.hpp"

using namespace gsmlab;
using namespace gsmlab::evaluator;
using odeint::Integrator;

namespace {

const gsm::MichelSuquetParams kParams{};
const auto kMs = make_michel_suquet("matrix", kParams);
const auto kFiber = make_linear_elastic("fiber", 380e9, 0.2);

std::vector<StrategyConfig> all_configs() {
  std::vector<StrategyConfig> out;
  for (Strategy s : {Strategy::conventional, Strategy::automatic, Strategy::semi_automatic})
    for (Integrator i : {Integrator::implicit_euler, Integrator::ode12, Integrator::ode23, Integrator::ode23s})
      for (odeint::ErrorMeasure e : {odeint::ErrorMeasure::internal, odeint::ErrorMeasure::stress}) {
        StrategyConfig c;
        c.strategy = s;
        c.integrator = i;
        c.error_measure = e;
        try {
          c.validate();
        } catch (const ConfigurationError&) {
          continue;
        }
        if (i == Integrator::implicit_euler && e == odeint::ErrorMeasure::stress) continue;
        out.push_back(c);
      }
  return out;
}

EvalRequest random_plastic_request(std::mt19937_64& rng) {
  const auto st = oracle::random_ms_state(rng);
  std::uniform_real_distribution<double> u(-1.5e-3, 1.5e-3);
  EvalRequest r;
  r.eps_n = st.eps;
  r.a_n = st.a;
  for (int i = 0; i < 6; ++i) r.eps_np1(i) = st.eps(i) + u(rng);
  r.dt = 0.5;
  r.want_tangent = true;
  return r;
}

EvalRequest uniaxial_request(double exx, double dt) {
  EvalRequest r;
  r.eps_np1(0) = exx;
  r.a_n = InternalState::Zero(7);
  r.dt = dt;
  r.want_tangent = true;
  return r;
}

bool same(const EvalResult& a, const EvalResult& b) {
  return a.stress == b.stress && a.a == b.a && a.tangent.has_value() == b.tangent.has_value() &&
         (!a.tangent || *a.tangent == *b.tangent) && a.substeps == b.substeps && a.rejected == b.rejected;
}

}  // namespace

TEST_CASE("configuration validation and names") {
  StrategyConfig c;
  c.strategy = Strategy::automatic;
  c.integrator = Integrator::ode23s;
  CHECK_THROWS_AS(c.validate(), ConfigurationError);
  c.strategy = Strategy::semi_automatic;
  CHECK_NOTHROW(c.validate());
  c.strategy = Strategy::conventional;
  CHECK_THROWS_AS(c.validate(), ConfigurationError);
  for (Strategy s : {Strategy::conventional, Strategy::automatic, Strategy::semi_automatic})
    CHECK(parse_strategy(to_string(s)) == s);
  CHECK_THROWS_AS(parse_strategy("manual"), ConfigurationError);
  CHECK(parse_error_measure("stress") == odeint::ErrorMeasure::stress);
  CHECK_THROWS_AS(parse_error_measure("energy"), ConfigurationError);
}

TEST_CASE("linear elastic law: stress, tangent and a single substep for every configuration") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1e-3);
  const StiffnessMat<> ce = kFiber->elastic_stiffness();
  for (const StrategyConfig& cfg : all_configs()) {
    EvalRequest r;
    for (int i = 0; i < 6; ++i) r.eps_np1(i) = n(rng);
    r.a_n = InternalState::Zero(0);
    r.dt = 0.3;
    r.want_tangent = true;
    const EvalResult out = kFiber->evaluate(cfg, r);
    CHECK(oracle::rel_err(out.stress, ce * r.eps_np1) <= 1e-14);
    CHECK(oracle::rel_err(*out.tangent, ce) <= 1e-14);
    CHECK(out.substeps == 1);
  }
}

TEST_CASE("zero time increment keeps the internal state") {
  std::mt19937_64 rng(4);
  for (const StrategyConfig& cfg : all_configs()) {
    EvalRequest r = random_plastic_request(rng);
    r.dt = 0.0;
    const EvalResult out = kMs->evaluate(cfg, r);
    CHECK(out.a == r.a_n);
    CHECK(oracle::rel_err(out.stress, kMs->elastic_stiffness() * (r.eps_np1 - r.a_n.head<6>())) <= 1e-12);
    CHECK(oracle::rel_err(*out.tangent, kMs->elastic_stiffness()) <= 1e-12);
  }
}

TEST_CASE("requests with the wrong state size are rejected") {
  EvalRequest r = uniaxial_request(1e-3, 1.0);
  r.a_n = InternalState::Zero(3);
  CHECK_THROWS_AS(kMs->evaluate(StrategyConfig{}, r), std::invalid_argument);
}

TEST_CASE("implicit Euler strategies agree to machine precision") {
  std::mt19937_64 rng(5);
  StrategyConfig conv, autom, semi;
  conv.strategy = Strategy::conventional;
  autom.strategy = Strategy::automatic;
  semi.strategy = Strategy::semi_automatic;
  for (int trial = 0; trial < 200; ++trial) {
    const EvalRequest r = random_plastic_request(rng);
    const EvalResult a = kMs->evaluate(conv, r);
    const EvalResult b = kMs->evaluate(autom, r);
    const EvalResult c = kMs->evaluate(semi, r);
    CHECK(oracle::rel_err(b.stress, a.stress) <= 1e-10);
    CHECK(oracle::rel_err(c.stress, a.stress) <= 1e-10);
    CHECK(oracle::rel_err(*b.tangent, *a.tangent) <= 1e-9);
    CHECK(oracle::rel_err(*c.tangent, *a.tangent) <= 1e-9);
  }
}

TEST_CASE("tangent equals finite differences of the frozen-substep stress map") {
  std::mt19937_64 rng(6);
  for (const StrategyConfig& cfg : all_configs()) {
    for (int trial = 0; trial < 6; ++trial) {
      const EvalRequest r = trial == 0 ? uniaxial_request(4e-3, 2.0) : random_plastic_request(rng);
      StepRecord steps;
      const EvalResult out = kMs->evaluate(cfg, r, &steps);
      const auto stress_of = [&](const Eigen::VectorXd& e) {
        EvalRequest q = r;
        q.eps_np1 = e;
        return Eigen::VectorXd(kMs->replay_stress(cfg, q, steps));
      };
      const Eigen::MatrixXd fd =
          oracle::fd_jacobian(stress_of, Eigen::VectorXd(r.eps_np1), Eigen::VectorXd::Constant(6, 1e-8));
      INFO("strategy " << to_string(cfg.strategy) << " integrator " << odeint::to_string(cfg.integrator));
      CHECK(oracle::rel_err(*out.tangent, fd) <= 1e-5);
    }
  }
}

TEST_CASE("steps that stay elastic return the elastic stiffness") {
  for (const StrategyConfig& cfg : all_configs()) {
    const EvalResult out = kMs->evaluate(cfg, uniaxial_request(2e-4, 1.0));
    CHECK(out.a.norm() == 0.0);
    CHECK(oracle::rel_err(*out.tangent, kMs->elastic_stiffness()) <= 1e-12);
  }
}

TEST_CASE("substep counts over the step length: explicit schemes rise, Rosenbrock stays flat") {
  StrategyConfig cfg;
  auto count = [&](Integrator which, double dt) {
    cfg.integrator = which;
    EvalRequest r = uniaxial_request(4e-3, dt);
    r.want_tangent = false;
    return kMs->evaluate(cfg, r).substeps;
  };
  for (Integrator which : {Integrator::ode12, Integrator::ode23}) {
    CHECK(count(which, 1e-7) <= 2);
    // accuracy-driven plateau, then stability-driven growth
    const int plateau = count(which, 1e-1);
    CHECK(count(which, 1.0) <= 1.5 * plateau);
    CHECK(count(which, 1e3) > 2 * plateau);
    CHECK(count(which, 1e4) > count(which, 1e3));
  }
  for (double dt : {1e-7, 1e-4, 1e-1, 1e2, 1e4}) CHECK(count(Integrator::ode23s, dt) <= 15);
}

TEST_CASE("batch evaluation is bitwise independent of threads and chunking") {
  std::mt19937_64 rng(7);
  const std::size_t n = 300;
  MaterialField field;
  field.materials = {kMs, kFiber};
  std::vector<EvalRequest> requests;
  for (std::size_t i = 0; i < n; ++i) {
    const bool fiber = i % 5 == 0;
    field.ids.push_back(fiber ? 1 : 0);
    EvalRequest r = random_plastic_request(rng);
    r.want_tangent = i % 3 != 0;
    if (fiber) r.a_n = InternalState::Zero(0);
    requests.push_back(r);
  }
  requests[17].a_n = InternalState::Zero(2);  // malformed

  StrategyConfig cfg;
  cfg.integrator = Integrator::ode23;
  std::vector<EvalResult> sequential(n);
  for (std::size_t i = 0; i < n; ++i)
    if (i != 17) sequential[i] = field.at(i).evaluate(cfg, requests[i]);

  for (int threads : {1, 4, 8}) {
    ThreadPool pool(threads);
    for (std::size_t chunk : {std::size_t{1}, std::size_t{7}, kDefaultChunk}) {
      const BatchResult b = evaluate_batch(field, cfg, requests, pool, chunk);
      REQUIRE(b.errors.size() == 1);
      CHECK(b.errors[0].index == 17);
      for (std::size_t i = 0; i < n; ++i)
        if (i != 17) CHECK(same(b.results[i], sequential[i]));
    }
  }
}

TEST_CASE("batch: single request and all-elastic fields") {
  MaterialField one;
  one.materials = {kMs};
  one.ids = {0};
  const std::vector<EvalRequest> req{uniaxial_request(4e-3, 1.0)};
  ThreadPool p1(1), p8(8);
  StrategyConfig cfg;
  cfg.integrator = Integrator::ode23s;
  CHECK(same(evaluate_batch(one, cfg, req, p1).results[0], evaluate_batch(one, cfg, req, p8).results[0]));

  MaterialField elastic;
  elastic.materials = {kFiber};
  elastic.ids.assign(1000, 0);
  std::vector<EvalRequest> reqs(1000);
  for (auto& r : reqs) {
    r.a_n = InternalState::Zero(0);
    r.eps_np1(0) = 1e-3;
    r.dt = 1.0;
  }
  const BatchResult b = evaluate_batch(elastic, cfg, reqs, p8, 64);
  CHECK(b.ok());
  for (const auto& r : b.results) CHECK(r.substeps == 1);

  elastic.ids[3] = 4;
  CHECK_THROWS_AS(elastic.validate(), std::invalid_argument);
}

TEST_CASE("thread pool runs every index once and forwards exceptions") {
  ThreadPool pool(4);
  std::vector<int> hits(1000, 0);
  pool.parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(pool.parallel_for(10, [](std::size_t i) {
    if (i == 5) throw std::runtime_error("boom");
  }),
                  std::runtime_error);
  pool.parallel_for(0, [](std::size_t) {});
  CHECK_THROWS(ThreadPool(0));
}
