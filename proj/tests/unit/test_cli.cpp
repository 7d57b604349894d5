#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "gsmlab/cli/config.hpp"
#include "gsmlab/cli/homogenize_runs.hpp"
#include "gsmlab/cli/single_voxel.hpp"
#include "gsmlab/evaluator/evaluator.hpp"

using namespace gsmlab;
using namespace gsmlab::cli;
using odeint::ErrorMeasure;
using odeint::Integrator;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

homogenize::PathStep point(int step, double t, double sxx) {
  homogenize::PathStep p;
  p.step = step;
  p.time = t;
  p.stress(0) = sxx;
  return p;
}

}  // namespace

TEST_CASE("config: defaults are valid and every key is listed once") {
  ExperimentConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  const auto& keys = cfg.keys();
  CHECK(std::set<std::string>(keys.begin(), keys.end()).size() == keys.size());
}

TEST_CASE("config: file values override defaults, unknown keys are rejected") {
  ExperimentConfig cfg;
  cfg.apply(io::KeyValueFile::parse(
      "grid = \"8,4,2\"\nintegrators = \"ode23,ode23s\"\nerror_measures = \"stress\"\nsteps = 10\nrtol = 1e-4\n"));
  CHECK(cfg.grid == homogenize::GridDims{8, 4, 2});
  CHECK(cfg.integrators == std::vector<Integrator>{Integrator::ode23, Integrator::ode23s});
  CHECK(cfg.error_measures == std::vector<ErrorMeasure>{ErrorMeasure::stress});
  CHECK(cfg.steps == std::vector<int>{10});
  CHECK(cfg.rtol == 1e-4);
  CHECK(cfg.strategy_config(Integrator::ode23, ErrorMeasure::stress).controller.rtol == 1e-4);
  CHECK(cfg.atol == 1e-6);

  ExperimentConfig other;
  CHECK_THROWS_AS(other.apply(io::KeyValueFile::parse("stepz = 3\n")), io::ConfigError);
  CHECK_THROWS(parse_integrators("ode45"));
  CHECK_THROWS(parse_grid("8,8"));
  CHECK_THROWS(parse_steps("20,-1"));
}

TEST_CASE("config: the text form reproduces the configuration") {
  ExperimentConfig cfg;
  cfg.apply(io::KeyValueFile::parse("experiment = x\nfiber_fraction = 0.2\nthreads = 3\nupdate_reference = true\nchunk_size = 64\n"));
  ExperimentConfig back;
  back.apply(io::KeyValueFile::parse(cfg.to_text()));
  CHECK(back.to_text() == cfg.to_text());
  CHECK(back.fiber_fraction == 0.2);
  CHECK(back.update_reference);
  CHECK(back.chunk_size == 64);
}

TEST_CASE("config: invalid values fail validation") {
  ExperimentConfig cfg;
  cfg.fiber_fraction = 0.7;
  CHECK_THROWS(cfg.validate());
  cfg = ExperimentConfig{};
  cfg.steps = {2};  // fewer steps than monotone segments
  CHECK_THROWS(cfg.validate());
  cfg = ExperimentConfig{};
  cfg.threads = 0;
  CHECK_THROWS(cfg.validate());
}

TEST_CASE("single voxel: elastic material under uniaxial stress") {
  const double young = 70e9, poisson = 0.3;
  const auto mat = evaluator::make_linear_elastic("el", young, poisson);
  homogenize::LoadingPath path;
  path.steps = 12;
  const auto series = single_voxel_path(*mat, evaluator::StrategyConfig{}, path);
  REQUIRE(series.size() == 12);
  for (const auto& s : series) {
    const double exx = path.strain_at_step(s.step);
    CHECK(s.strain(0) == exx);
    CHECK(s.stress(0) == doctest::Approx(young * exx).epsilon(1e-10));
    CHECK(s.strain(1) == doctest::Approx(-poisson * exx).epsilon(1e-10));
    CHECK(s.stress.tail<5>().norm() <= 1e-9 * young * std::abs(path.upper));
  }
}

TEST_CASE("deviation: interpolation in time and the peak step") {
  const std::vector<homogenize::PathStep> fine{point(1, 0.5, 1.0), point(2, 1.0, 2.0), point(3, 1.5, 3.0), point(4, 2.0, 3.0)};
  CHECK(sigma_xx_at(fine, 0.25) == doctest::Approx(0.5));
  CHECK(sigma_xx_at(fine, 1.0) == 2.0);
  CHECK(sigma_xx_at(fine, 1.75) == 3.0);
  CHECK_THROWS(sigma_xx_at(fine, 2.5));
  const std::vector<homogenize::PathStep> coarse{point(1, 1.0, 2.5), point(2, 2.0, 2.0)};
  const Deviation d = sigma_xx_deviation(coarse, fine);
  CHECK(d.max_abs == 1.0);
  CHECK(d.step == 2);
  CHECK(d.time == 2.0);
}

TEST_CASE("run matrix: implicit Euler once per step count") {
  ExperimentConfig cfg;
  cfg.error_measures = {ErrorMeasure::internal, ErrorMeasure::stress};
  cfg.steps = {20, 40};
  const auto m = run_matrix(cfg);
  CHECK(m.size() == 2 * (1 + 3 * 2));
  CHECK(m.front().label() == "implicit-euler_internal_20");
}

TEST_CASE("experiment output is identical across thread counts") {
  const auto root = std::filesystem::temp_directory_path() / "gsmlab_test_cli_threads";
  std::filesystem::remove_all(root);
  ExperimentConfig cfg;
  cfg.grid = {4, 4, 4};
  cfg.integrators = {Integrator::implicit_euler, Integrator::ode23};
  cfg.steps = {4, 8};
  cfg.fiber_fraction = 0.15;
  cfg.chunk_size = 8;
  std::vector<std::string> outputs;
  for (int threads : {1, 4, 8}) {
    cfg.threads = threads;
    cfg.out = root / std::to_string(threads);
    const auto runs = run_homogenize(cfg);
    for (const auto& r : runs) CHECK(r.status == "ok");
    std::string all;
    for (const auto& r : runs) all += slurp(cfg.out / (cfg.experiment + "_" + r.spec.label() + ".csv"));
    all += slurp(cfg.out / (cfg.experiment + "_summary.csv"));
    outputs.push_back(all);
  }
  CHECK(!outputs[0].empty());
  CHECK(outputs[0] == outputs[1]);
  CHECK(outputs[0] == outputs[2]);
  std::filesystem::remove_all(root);
}
