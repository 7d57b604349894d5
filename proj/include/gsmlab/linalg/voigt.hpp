#pragma once

// Voigt tensor helpers, generic over the scalar type.

#include <cmath>

#include "gsmlab/ad/dual.hpp"
#include "gsmlab/linalg/types.hpp"

namespace gsmlab::linalg {

// Lame constants (lambda, mu) from Young's modulus and Poisson's ratio.
struct Lame {
  double lambda;
  double mu;

  static Lame from_young(double young, double poisson) {
    return {young * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson)),
            young / (2.0 * (1.0 + poisson))};
  }
  double bulk() const { return lambda + 2.0 * mu / 3.0; }
};

// Isotropic stiffness acting on engineering-shear strain.
inline StiffnessMat<> isotropic_stiffness(const Lame& l) {
  StiffnessMat<> c = StiffnessMat<>::Zero();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) c(i, j) = l.lambda;
    c(i, i) = l.lambda + 2.0 * l.mu;
    c(i + 3, i + 3) = l.mu;
  }
  return c;
}

inline StiffnessMat<> isotropic_stiffness(double young, double poisson) {
  return isotropic_stiffness(Lame::from_young(young, poisson));
}

template <class S>
S trace(const VoigtVec<S>& x) {
  return x(0) + x(1) + x(2);
}

// Deviator: removes the mean of the normal components; shear untouched.
template <class S>
VoigtVec<S> dev(const VoigtVec<S>& x) {
  const S mean = trace(x) / 3.0;
  VoigtVec<S> d = x;
  for (int i = 0; i < 3; ++i) d(i) -= mean;
  return d;
}

// von Mises norm sqrt(3/2 dev(s):dev(s)) of a stress-like vector; the
// off-diagonal terms count twice in the contraction.
template <class S>
S mises_dev_norm(const VoigtVec<S>& s) {
  using std::sqrt;
  using ad::sqrt;
  const VoigtVec<S> d = dev(s);
  const S q = 1.5 * (d(0) * d(0) + d(1) * d(1) + d(2) * d(2)) +
              3.0 * (d(3) * d(3) + d(4) * d(4) + d(5) * d(5));
  return sqrt(q);
}

// Tensor contraction of two stress-like vectors.
template <class S>
S contract_stress(const VoigtVec<S>& a, const VoigtVec<S>& b) {
  return a(0) * b(0) + a(1) * b(1) + a(2) * b(2) + 2.0 * (a(3) * b(3) + a(4) * b(4) + a(5) * b(5));
}

// Mandel scaling (1,1,1,sqrt2,sqrt2,sqrt2); maps a Voigt stiffness on
// engineering strain to its orthonormal-basis representation.
inline StiffnessMat<> to_mandel(const StiffnessMat<>& c) {
  VoigtVec<> w;
  const double r2 = std::sqrt(2.0);
  w << 1.0, 1.0, 1.0, r2, r2, r2;
  return w.asDiagonal() * c * w.asDiagonal();
}

}  // namespace gsmlab::linalg
