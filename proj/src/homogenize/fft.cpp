#include "gsmlab/homogenize/fft.hpp"

#include <unsupported/Eigen/FFT>

namespace gsmlab::homogenize {

void GridDims::validate() const {
  for (int n : as_array()) {
    if (n < 1) throw std::invalid_argument("grid dimensions must be positive");
    int r = n;
    for (int p : {2, 3, 5, 7})
      while (r % p == 0) r /= p;
    if (r != 1) throw std::invalid_argument("grid dimension " + std::to_string(n) + " has prime factors above 7");
  }
}

struct Fft3d::Impl {
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> work;
  std::vector<std::complex<double>> line_in;
  std::vector<std::complex<double>> line_out;
};

Fft3d::Fft3d(const GridDims& dims) : dims_(dims), impl_(std::make_unique<Impl>()) {
  dims_.validate();
  impl_->work.resize(dims_.size());
}
Fft3d::~Fft3d() = default;
Fft3d::Fft3d(Fft3d&&) noexcept = default;
Fft3d& Fft3d::operator=(Fft3d&&) noexcept = default;

void Fft3d::transform_axes(std::complex<double>* data, bool inverse) {
  const std::array<int, 3> n = dims_.as_array();
  const std::array<std::size_t, 3> stride = {1, static_cast<std::size_t>(n[0]),
                                             static_cast<std::size_t>(n[0]) * static_cast<std::size_t>(n[1])};
  Impl& im = *impl_;
  for (int axis = 0; axis < 3; ++axis) {
    const int len = n[static_cast<std::size_t>(axis)];
    if (len == 1) continue;
    const std::size_t s = stride[static_cast<std::size_t>(axis)];
    im.line_in.resize(static_cast<std::size_t>(len));
    im.line_out.resize(static_cast<std::size_t>(len));
    const std::size_t lines = dims_.size() / static_cast<std::size_t>(len);
    for (std::size_t l = 0; l < lines; ++l) {
      // start of the l-th line along `axis`
      const std::size_t inner = l % s;
      const std::size_t outer = l / s;
      const std::size_t start = inner + outer * s * static_cast<std::size_t>(len);
      for (int k = 0; k < len; ++k) im.line_in[static_cast<std::size_t>(k)] = data[start + static_cast<std::size_t>(k) * s];
      if (inverse)
        im.fft.inv(im.line_out, im.line_in);
      else
        im.fft.fwd(im.line_out, im.line_in);
      for (int k = 0; k < len; ++k) data[start + static_cast<std::size_t>(k) * s] = im.line_out[static_cast<std::size_t>(k)];
    }
  }
}

void Fft3d::forward(const double* in, std::complex<double>* out) {
  for (std::size_t i = 0; i < dims_.size(); ++i) out[i] = in[i];
  transform_axes(out, false);
}

void Fft3d::inverse(const std::complex<double>* in, double* out) {
  std::copy(in, in + dims_.size(), impl_->work.begin());
  transform_axes(impl_->work.data(), true);
  for (std::size_t i = 0; i < dims_.size(); ++i) out[i] = impl_->work[i].real();
}

}  // namespace gsmlab::homogenize
