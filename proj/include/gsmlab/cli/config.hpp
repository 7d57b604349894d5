#pragma once

// Experiment configuration: a flat key-value file, then command-line
// overrides. Every key has a default; unknown keys are rejected.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gsmlab/evaluator/evaluator.hpp"
#include "gsmlab/gsm/michel_suquet.hpp"
#include "gsmlab/homogenize/grid.hpp"
#include "gsmlab/homogenize/loading.hpp"
#include "gsmlab/io/keyvalue.hpp"

namespace gsmlab::cli {

struct ExperimentConfig {
  std::string experiment = "gsmlab";
  std::filesystem::path material;  // Michel-Suquet parameter file; empty for the built-in set
  gsm::MichelSuquetParams matrix{};
  double fiber_young = 300e9;
  double fiber_poisson = 0.25;

  evaluator::Strategy strategy = evaluator::Strategy::semi_automatic;
  std::vector<odeint::Integrator> integrators{odeint::Integrator::implicit_euler, odeint::Integrator::ode12,
                                              odeint::Integrator::ode23, odeint::Integrator::ode23s};
  std::vector<odeint::ErrorMeasure> error_measures{odeint::ErrorMeasure::stress};
  std::vector<int> steps{20, 40, 80, 160, 320};
  double atol = 1e-6;
  double rtol = 1e-3;

  homogenize::GridDims grid{16, 16, 16};
  double fiber_fraction = 0.1;
  std::filesystem::path geometry;  // sidecar of a raw id file; overrides the generated fiber
  double fft_tolerance = 1e-5;
  double bc_tolerance = 1e-5;
  int max_iterations = 5000;
  bool update_reference = false;
  bool record_tangent = true;

  homogenize::LoadingPath path{};  // steps are taken from `steps`

  double sweep_strain = 4e-3;
  std::vector<double> sweep_dts{1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3, 1e4};
  double reference_atol = 1e-8;
  double reference_rtol = 1e-6;

  std::filesystem::path out = "out";
  int threads = 1;
  std::size_t chunk_size = evaluator::kDefaultChunk;
  std::uint64_t seed = 42;

  static const std::vector<std::string>& keys();
  // Applies the keys present in `kv` on top of the current values.
  void apply(const io::KeyValueFile& kv);
  void validate() const;

  evaluator::StrategyConfig strategy_config(odeint::Integrator which, odeint::ErrorMeasure measure) const;
  // Key-value text that reproduces this configuration.
  std::string to_text() const;
};

std::vector<odeint::Integrator> parse_integrators(const std::string& list);
std::vector<odeint::ErrorMeasure> parse_error_measures(const std::string& list);
std::vector<int> parse_steps(const std::string& list);
homogenize::GridDims parse_grid(const std::string& text);

}  // namespace gsmlab::cli
