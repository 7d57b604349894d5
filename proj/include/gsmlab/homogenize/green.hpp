#pragma once

// Periodic Green operator of an isotropic reference medium, continuous
// frequency form. For a unit wave direction n and symmetric tau,
//
//   (Gamma tau)_kh = (n_k t_h + n_h t_k) / (2 mu0) - c (n.t) n_k n_h,
//   t = tau n,   c = (lambda0 + mu0) / (mu0 (lambda0 + 2 mu0)).
//
// The zero frequency and every frequency with a Nyquist component map to
// zero.

#include <array>
#include <complex>
#include <optional>

#include "gsmlab/homogenize/fft.hpp"
#include "gsmlab/homogenize/grid.hpp"
#include "gsmlab/linalg/types.hpp"

namespace gsmlab::homogenize {

struct ReferenceMaterial {
  double lambda = 0.0;
  double mu = 0.0;

  StiffnessMat<> stiffness() const;
  void validate() const;
};

using ComplexVoigt = Eigen::Matrix<std::complex<double>, 6, 1>;

// Unit wave direction of DFT bin (kx, ky, kz), or nothing for the zero and
// Nyquist bins. Unit voxels: the physical frequency is k_i / n_i.
std::optional<Eigen::Vector3d> wave_direction(const GridDims& dims, int kx, int ky, int kz);

// Gamma applied to a stress amplitude (tensor shear) giving a strain amplitude
// (engineering shear).
ComplexVoigt green_frequency(const Eigen::Vector3d& n, const ReferenceMaterial& ref, const ComplexVoigt& tau);

// Six transformed components, one per Voigt row.
using SpectralField = std::array<std::vector<std::complex<double>>, 6>;

// -Gamma * tau in real space.
VoigtField green_apply(const VoigtField& tau, const GridDims& dims, const ReferenceMaterial& ref);

}  // namespace gsmlab::homogenize
