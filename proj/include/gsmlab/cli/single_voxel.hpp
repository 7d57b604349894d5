#pragma once

// Single-voxel studies: substep counts over the step length, and the error
// of differentiated internal variables along the uniaxial loading path.

#include <ostream>
#include <string>
#include <vector>

#include "gsmlab/cli/config.hpp"
#include "gsmlab/evaluator/evaluator.hpp"
#include "gsmlab/homogenize/loading.hpp"

namespace gsmlab::cli {

struct VoxelStep {
  int step = 0;
  double time = 0.0;
  VoigtVec<> strain = VoigtVec<>::Zero();
  VoigtVec<> stress = VoigtVec<>::Zero();
  StiffnessMat<> tangent = StiffnessMat<>::Zero();
  evaluator::InternalState a;
  int substeps = 0;
  int mixed_iterations = 0;
};

// One voxel along `path`: eps_xx prescribed, the other five stresses held at
// zero by Newton iterations on the free strains with the consistent tangent.
std::vector<VoxelStep> single_voxel_path(const evaluator::Material& mat, const evaluator::StrategyConfig& cfg,
                                         const homogenize::LoadingPath& path);

struct SubstepRow {
  std::string integrator;
  double dt = 0.0;
  int substeps = 0;
  int rejected = 0;
  int newton_iterations = 0;
  double sigma_xx = 0.0;
  std::string status = "ok";
};

// Uniaxial strain step of size `sweep_strain` from the virgin state for every
// integrator and step length of the configuration. Failures become rows.
std::vector<SubstepRow> substep_sweep(const ExperimentConfig& cfg);
void write_substep_csv(std::ostream& out, const std::vector<SubstepRow>& rows);

struct TangentErrorRow {
  int steps = 0;
  std::string method;  // implicit_euler or adaptive_implicit_euler
  int plastic_steps = 0;  // steps with active flow and a non-negligible reference derivative
  double median_rel_error = 0.0;
  double mean_rel_error = 0.0;
  double max_rel_error = 0.0;
  std::string status = "ok";
};

// Relative error of d eps_vp,xx / d eps_xx (partial, end of step) along the uniaxial path for a
// single implicit Euler step and for adaptive implicit Euler substepping,
// both against a tightly controlled adaptive implicit Euler reference. All
// three start every loading step from the reference's committed state.
std::vector<TangentErrorRow> tangent_error_study(const ExperimentConfig& cfg);
void write_tangent_error_csv(std::ostream& out, const std::vector<TangentErrorRow>& rows);

}  // namespace gsmlab::cli
