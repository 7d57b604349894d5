#pragma once

// Loading-path runs on the voxel grid over the (integrator x error measure x
// step count) matrix of a configuration.

#include <ostream>
#include <string>
#include <vector>

#include "gsmlab/cli/config.hpp"
#include "gsmlab/evaluator/thread_pool.hpp"
#include "gsmlab/homogenize/loading.hpp"
#include "gsmlab/homogenize/solver.hpp"

namespace gsmlab::cli {

struct RunSpec {
  odeint::Integrator integrator = odeint::Integrator::implicit_euler;
  odeint::ErrorMeasure measure = odeint::ErrorMeasure::internal;
  int steps = 80;

  std::string label() const;  // e.g. ode23_internal_80
};

struct RunResult {
  RunSpec spec;
  std::vector<homogenize::PathStep> series;
  std::string status = "ok";
};

// Implicit Euler has no error control: one run per step count, labelled internal.
std::vector<RunSpec> run_matrix(const ExperimentConfig& cfg);

// Matrix with id 0, fiber with id 1: read from `cfg.geometry` or generated.
homogenize::VoxelGrid make_grid(const ExperimentConfig& cfg);

RunResult run_one(const ExperimentConfig& cfg, const RunSpec& spec, evaluator::ThreadPool& pool);

struct Deviation {
  double max_abs = 0.0;
  int step = 0;  // coarse step index of the maximum
  double time = 0.0;
};

// Fine-series sig_xx at time t, linear between steps.
double sigma_xx_at(const std::vector<homogenize::PathStep>& series, double t);

// max |sig_xx(coarse) - sig_xx(fine)| at the coarse step times.
Deviation sigma_xx_deviation(const std::vector<homogenize::PathStep>& coarse,
                             const std::vector<homogenize::PathStep>& fine);

// One row per run: deviation from the finest run with the same integrator and
// error measure, plus iteration and substep totals.
void write_summary_csv(std::ostream& out, const std::vector<RunResult>& runs);

// Runs the matrix and writes `<experiment>_<label>.csv` for every run and
// `<experiment>_summary.csv` into `cfg.out`.
std::vector<RunResult> run_homogenize(const ExperimentConfig& cfg);

}  // namespace gsmlab::cli
