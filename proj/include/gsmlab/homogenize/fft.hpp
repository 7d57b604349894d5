#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "gsmlab/homogenize/grid.hpp"

namespace gsmlab::homogenize {

// Unnormalized 3D DFT, X(k) = sum_x x(x) exp(-2 pi i k.x / n), and its inverse
// including the 1/N factor. Built from 1D transforms along each axis.
class Fft3d {
 public:
  explicit Fft3d(const GridDims& dims);
  ~Fft3d();
  Fft3d(Fft3d&&) noexcept;
  Fft3d& operator=(Fft3d&&) noexcept;

  const GridDims& dims() const { return dims_; }
  void forward(const double* in, std::complex<double>* out);
  void inverse(const std::complex<double>* in, double* out);

 private:
  void transform_axes(std::complex<double>* data, bool inverse);

  struct Impl;
  GridDims dims_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace gsmlab::homogenize
