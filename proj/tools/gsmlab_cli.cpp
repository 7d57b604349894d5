// Command-line front end: single-voxel studies, loading-path runs on the
// voxel grid, and the invariant self-test.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "gsmlab/cli/config.hpp"
#include "gsmlab/cli/homogenize_runs.hpp"
#include "gsmlab/cli/selftest.hpp"
#include "gsmlab/cli/single_voxel.hpp"

namespace {

using gsmlab::cli::ExperimentConfig;

struct Overrides {
  std::string config;
  std::optional<int> threads;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> steps, integrator, strategy, error_measure;
};

void add_common(CLI::App* cmd, Overrides& o, const ExperimentConfig& d) {
  cmd->add_option("--config", o.config, "key = value configuration file");
  cmd->add_option("--threads", o.threads, "worker threads (default " + std::to_string(d.threads) + ")");
  cmd->add_option("--out", o.out, "output directory (default " + d.out.string() + ")");
  cmd->add_option("--seed", o.seed, "RNG seed of the generated fiber (default " + std::to_string(d.seed) + ")");
  cmd->add_option("--steps", o.steps, "loading-step counts, e.g. 20,40,80 (default 20,40,80,160,320)");
  cmd->add_option("--integrator", o.integrator,
                  "integrators: implicit-euler, ode12, ode23, ode23s (default all four)");
  cmd->add_option("--strategy", o.strategy,
                  "conventional, automatic or semi-automatic (default semi-automatic)");
  cmd->add_option("--error-measure", o.error_measure, "internal and/or stress (default stress)");
}

ExperimentConfig resolve(const Overrides& o) {
  ExperimentConfig cfg;
  if (!o.config.empty()) cfg.apply(gsmlab::io::KeyValueFile::load(o.config));
  if (o.threads) cfg.threads = *o.threads;
  if (o.out) cfg.out = *o.out;
  if (o.seed) cfg.seed = *o.seed;
  if (o.steps) cfg.steps = gsmlab::cli::parse_steps(*o.steps);
  if (o.integrator) cfg.integrators = gsmlab::cli::parse_integrators(*o.integrator);
  if (o.strategy) cfg.strategy = gsmlab::evaluator::parse_strategy(*o.strategy);
  if (o.error_measure) cfg.error_measures = gsmlab::cli::parse_error_measures(*o.error_measure);
  cfg.validate();
  return cfg;
}

template <class Rows, class Writer>
void write_file(const std::filesystem::path& path, const Rows& rows, Writer&& writer) {
  std::ofstream f(path);
  writer(f, rows);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  std::cout << "wrote " << path.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gsmlab: generalized standard materials with automatic differentiation and adaptive integration"};
  app.require_subcommand(1);
  const ExperimentConfig defaults;
  Overrides sv, hz, st;
  CLI::App* single = app.add_subcommand("single-voxel", "substep sweep over the step length and tangent-error study");
  add_common(single, sv, defaults);
  CLI::App* homog = app.add_subcommand("homogenize", "loading-path runs on the voxel grid over the run matrix");
  add_common(homog, hz, defaults);
  CLI::App* self = app.add_subcommand("selftest", "run the invariant suites");
  add_common(self, st, defaults);
  CLI11_PARSE(app, argc, argv);

  try {
    if (single->parsed()) {
      const ExperimentConfig cfg = resolve(sv);
      std::filesystem::create_directories(cfg.out);
      write_file(cfg.out / (cfg.experiment + "_substeps.csv"), gsmlab::cli::substep_sweep(cfg),
                 gsmlab::cli::write_substep_csv);
      write_file(cfg.out / (cfg.experiment + "_tangent_error.csv"), gsmlab::cli::tangent_error_study(cfg),
                 gsmlab::cli::write_tangent_error_csv);
      return 0;
    }
    if (homog->parsed()) {
      const ExperimentConfig cfg = resolve(hz);
      const auto runs = gsmlab::cli::run_homogenize(cfg);
      int failed = 0;
      for (const auto& r : runs) {
        std::cout << r.spec.label() << ": " << r.status << '\n';
        failed += r.status != "ok";
      }
      std::cout << "wrote " << runs.size() << " runs and " << (cfg.out / (cfg.experiment + "_summary.csv")).string()
                << '\n';
      return failed ? 1 : 0;
    }
    const ExperimentConfig cfg = resolve(st);
    const auto results = gsmlab::cli::run_selftest(cfg.seed, cfg.threads);
    gsmlab::cli::print_selftest(std::cout, results);
    for (const auto& r : results)
      if (!r.passed) return 1;
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
