#pragma once

#include <Eigen/Core>
#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace gsmlab::homogenize {

// Voxel counts per axis; voxels are unit cubes, linear index x + nx (y + ny z).
struct GridDims {
  int nx = 1;
  int ny = 1;
  int nz = 1;

  std::size_t size() const { return static_cast<std::size_t>(nx) * ny * nz; }
  std::array<int, 3> as_array() const { return {nx, ny, nz}; }
  std::size_t index(int x, int y, int z) const {
    return static_cast<std::size_t>(x) + static_cast<std::size_t>(nx) * (y + static_cast<std::size_t>(ny) * z);
  }
  bool operator==(const GridDims&) const = default;

  // Positive and made of the factors 2, 3, 5, 7 only.
  void validate() const;
};

// One Voigt 6-vector per voxel, column-wise.
using VoigtField = Eigen::Matrix<double, 6, Eigen::Dynamic>;

}  // namespace gsmlab::homogenize
