#include "gsmlab/homogenize/green.hpp"

#include <cmath>
#include <stdexcept>

#include "gsmlab/linalg/voigt.hpp"

namespace gsmlab::homogenize {

StiffnessMat<> ReferenceMaterial::stiffness() const { return linalg::isotropic_stiffness(linalg::Lame{lambda, mu}); }

void ReferenceMaterial::validate() const {
  if (!(mu > 0.0) || !(3.0 * lambda + 2.0 * mu > 0.0) || !std::isfinite(lambda) || !std::isfinite(mu))
    throw std::invalid_argument("reference material must be positive definite");
}

std::optional<Eigen::Vector3d> wave_direction(const GridDims& dims, int kx, int ky, int kz) {
  const std::array<int, 3> n = dims.as_array();
  const std::array<int, 3> k = {kx, ky, kz};
  Eigen::Vector3d xi;
  for (std::size_t a = 0; a < 3; ++a) {
    if (n[a] % 2 == 0 && k[a] == n[a] / 2) return std::nullopt;
    const int signed_k = k[a] <= n[a] / 2 ? k[a] : k[a] - n[a];
    xi(static_cast<Eigen::Index>(a)) = static_cast<double>(signed_k) / n[a];
  }
  const double norm = xi.norm();
  if (norm == 0.0) return std::nullopt;
  return xi / norm;
}

ComplexVoigt green_frequency(const Eigen::Vector3d& n, const ReferenceMaterial& ref, const ComplexVoigt& tau) {
  using C = std::complex<double>;
  // t = tau n with tau in Voigt order (xx, yy, zz, yz, xz, xy)
  const C t0 = tau(0) * n(0) + tau(5) * n(1) + tau(4) * n(2);
  const C t1 = tau(5) * n(0) + tau(1) * n(1) + tau(3) * n(2);
  const C t2 = tau(4) * n(0) + tau(3) * n(1) + tau(2) * n(2);
  const C nt = n(0) * t0 + n(1) * t1 + n(2) * t2;
  const double a = 1.0 / (2.0 * ref.mu);
  const double c = (ref.lambda + ref.mu) / (ref.mu * (ref.lambda + 2.0 * ref.mu));
  ComplexVoigt e;
  e(0) = a * 2.0 * n(0) * t0 - c * nt * n(0) * n(0);
  e(1) = a * 2.0 * n(1) * t1 - c * nt * n(1) * n(1);
  e(2) = a * 2.0 * n(2) * t2 - c * nt * n(2) * n(2);
  // engineering shear: twice the tensor component
  e(3) = 2.0 * (a * (n(1) * t2 + n(2) * t1) - c * nt * n(1) * n(2));
  e(4) = 2.0 * (a * (n(0) * t2 + n(2) * t0) - c * nt * n(0) * n(2));
  e(5) = 2.0 * (a * (n(0) * t1 + n(1) * t0) - c * nt * n(0) * n(1));
  return e;
}

VoigtField green_apply(const VoigtField& tau, const GridDims& dims, const ReferenceMaterial& ref) {
  ref.validate();
  const std::size_t n = dims.size();
  if (static_cast<std::size_t>(tau.cols()) != n) throw std::invalid_argument("green_apply: field size mismatch");
  Fft3d fft(dims);
  SpectralField spec;
  std::vector<double> comp(n);
  for (int r = 0; r < 6; ++r) {
    for (std::size_t i = 0; i < n; ++i) comp[i] = tau(r, static_cast<Eigen::Index>(i));
    spec[static_cast<std::size_t>(r)].resize(n);
    fft.forward(comp.data(), spec[static_cast<std::size_t>(r)].data());
  }
  for (int z = 0; z < dims.nz; ++z)
    for (int y = 0; y < dims.ny; ++y)
      for (int x = 0; x < dims.nx; ++x) {
        const std::size_t i = dims.index(x, y, z);
        const auto dir = wave_direction(dims, x, y, z);
        ComplexVoigt t;
        for (int r = 0; r < 6; ++r) t(r) = spec[static_cast<std::size_t>(r)][i];
        const ComplexVoigt e = dir ? ComplexVoigt(-green_frequency(*dir, ref, t)) : ComplexVoigt::Zero();
        for (int r = 0; r < 6; ++r) spec[static_cast<std::size_t>(r)][i] = e(r);
      }
  VoigtField out(6, static_cast<Eigen::Index>(n));
  for (int r = 0; r < 6; ++r) {
    fft.inverse(spec[static_cast<std::size_t>(r)].data(), comp.data());
    for (std::size_t i = 0; i < n; ++i) out(r, static_cast<Eigen::Index>(i)) = comp[i];
  }
  return out;
}

}  // namespace gsmlab::homogenize
