#pragma once

// Basic fixed-point scheme on a periodic voxel grid:
//
//   eps^(k+1) = E^(k) - Gamma0 * (sigma(eps^k) - C0 eps^k),
//
// implemented in Fourier space as eps_hat <- eps_hat - Gamma0 sigma_hat for
// nonzero frequencies and eps_hat(0) = E. Components of E that are not
// strain-controlled are corrected every iteration so that the corresponding
// mean stresses vanish.

#include <array>
#include <memory>
#include <stdexcept>
#include <vector>

#include "gsmlab/evaluator/batch.hpp"
#include "gsmlab/evaluator/evaluator.hpp"
#include "gsmlab/homogenize/green.hpp"
#include "gsmlab/homogenize/grid.hpp"

namespace gsmlab::homogenize {

struct VoxelGrid {
  GridDims dims;
  std::vector<std::shared_ptr<const evaluator::Material>> materials;
  std::vector<std::uint16_t> ids;
  VoigtField strain;                              // committed eps_n
  std::vector<evaluator::InternalState> state;    // committed a_n

  // Zero strain, initial internal states.
  static VoxelGrid make(const GridDims& dims, std::vector<std::shared_ptr<const evaluator::Material>> materials,
                        std::vector<std::uint16_t> ids);
  evaluator::MaterialField field() const { return {materials, ids}; }
  double volume_fraction(std::uint16_t id) const;
};

// Mean-strain control: components with `strain_controlled` follow `strain`,
// the others are adjusted to zero mean stress.
struct MacroLoad {
  VoigtVec<> strain = VoigtVec<>::Zero();
  std::array<bool, 6> strain_controlled{true, true, true, true, true, true};

  static MacroLoad strain_only(const VoigtVec<>& e) { return {e, {true, true, true, true, true, true}}; }
  static MacroLoad uniaxial(double exx, const VoigtVec<>& guess) {
    MacroLoad m{guess, {true, false, false, false, false, false}};
    m.strain(0) = exx;
    return m;
  }
};

struct SchemeOptions {
  double tolerance = 1e-5;       // equilibrium residual
  double bc_tolerance = 1e-5;    // free mean stresses relative to |mean stress|
  int max_iterations = 5000;
  // Adaptive evaluations start from the previous iteration's substeps.
  bool warm_start = true;
  std::size_t chunk_size = evaluator::kDefaultChunk;  // voxels per work item
};

class SolveError : public std::runtime_error {
 public:
  SolveError(const std::string& what, std::vector<double> residuals)
      : std::runtime_error(what), residuals_(std::move(residuals)) {}
  const std::vector<double>& residuals() const { return residuals_; }

 private:
  std::vector<double> residuals_;
};

struct SolveResult {
  VoigtField strain;
  VoigtField stress;
  VoigtVec<> mean_strain;
  VoigtVec<> mean_stress;
  int iterations = 0;                   // material sweeps
  std::vector<double> residuals;        // one per sweep
  std::vector<evaluator::EvalResult> results;  // of the final sweep
};

// Equilibrium residual of a stress field: L2 norm of sigma_hat(xi) n(xi) over
// nonzero frequencies, relative to |mean stress| (Frobenius, tensor form).
double equilibrium_residual(const SpectralField& stress_hat, const GridDims& dims);

class BasicScheme {
 public:
  BasicScheme(const GridDims& dims, evaluator::ThreadPool& pool);

  // Solves one loading step from the committed state of `grid` over `dt`,
  // starting from `initial` (compatible; typically the committed strain plus a
  // uniform increment).
  SolveResult solve(const VoxelGrid& grid, const evaluator::StrategyConfig& cfg, double dt, const MacroLoad& load,
                    const ReferenceMaterial& ref, const VoigtField& initial, const SchemeOptions& opt = {});

 private:
  GridDims dims_;
  evaluator::ThreadPool* pool_;
  Fft3d fft_;
  std::vector<std::optional<Eigen::Vector3d>> directions_;
};

// Reference medium from per-voxel tangents: bulk and shear moduli at the
// midpoints of their ranges over the field (Mandel eigenvalue bounds).
ReferenceMaterial reference_update(const std::vector<StiffnessMat<>>& tangents);

// Moduli bounds of one tangent: 3K from the volumetric direction, 2 mu range
// from the spectrum restricted to deviatoric tensors.
struct ModuliBounds {
  double bulk;
  double mu_min;
  double mu_max;
};
ModuliBounds moduli_bounds(const StiffnessMat<>& c);

}  // namespace gsmlab::homogenize
