#pragma once

#include <array>
#include <optional>
#include <vector>

#include "gsmlab/evaluator/thread_pool.hpp"
#include "gsmlab/homogenize/solver.hpp"

namespace gsmlab::homogenize {

// Uniaxial tension-compression cycle 0 -> upper -> lower -> 0 at constant
// strain-rate magnitude. The steps are shared among the three monotone
// segments in proportion to their durations and are equidistant within each,
// so the reversal points fall on step boundaries.
struct LoadingPath {
  double rate = 1.4e-3;      // 1/s
  double upper = 3.58454e-3;
  double lower = -3.48441e-3;
  int steps = 80;
  bool mixed = true;         // zero mean stress in the other five components

  void validate() const;
  double total_time() const;
  double strain_at(double t) const;
  std::array<int, 3> segment_steps() const;
  double time_at(int step) const;    // step in [0, steps]
  double strain_at_step(int step) const;
};

struct PathOptions {
  bool update_reference = false;  // tangent sweep and new reference before each step
  bool record_tangent = false;    // tangent sweep at the converged state for the mean tangent
  SchemeOptions scheme{};
  std::optional<ReferenceMaterial> reference;  // fixed reference; default from the elastic phases
};

struct PathStep {
  int step = 0;
  double time = 0.0;
  double eps_xx = 0.0;
  VoigtVec<> stress = VoigtVec<>::Zero();
  double c11 = 0.0;  // NaN unless tangents were computed
  double c12 = 0.0;
  int iterations = 0;
  double mean_substeps = 0.0;
};

// Runs the whole path, committing strain and internal state of `grid` after
// every converged step. Returns one record per step (step 0 excluded).
std::vector<PathStep> run_loading_path(VoxelGrid& grid, const LoadingPath& path,
                                       const evaluator::StrategyConfig& cfg, evaluator::ThreadPool& pool,
                                       const PathOptions& opt = {});

// Reference from the elastic stiffnesses of the materials present in the grid.
ReferenceMaterial elastic_reference(const VoxelGrid& grid);

// Mean tangent of a with-tangent sweep at the given strain field.
StiffnessMat<> tangent_sweep(const VoxelGrid& grid, const evaluator::StrategyConfig& cfg, double dt,
                             const VoigtField& strain, evaluator::ThreadPool& pool,
                             std::vector<StiffnessMat<>>* field = nullptr,
                             std::size_t chunk_size = evaluator::kDefaultChunk);

}  // namespace gsmlab::homogenize
