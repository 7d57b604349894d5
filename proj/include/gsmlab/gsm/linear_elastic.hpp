#pragma once

#include "gsmlab/ad/reverse.hpp"
#include "gsmlab/linalg/types.hpp"
#include "gsmlab/linalg/voigt.hpp"

namespace gsmlab::gsm {

// Isotropic linear elasticity as a GSM without internal variables.
class LinearElastic {
 public:
  static constexpr int kInternal = 0;
  static constexpr bool kHasHandPartials = true;
  static constexpr bool kHasConventional = true;

  LinearElastic(double young, double poisson) : lame_(linalg::Lame::from_young(young, poisson)) {}
  explicit LinearElastic(linalg::Lame lame) : lame_(lame) {}

  const linalg::Lame& lame() const { return lame_; }
  StiffnessMat<> elastic_stiffness() const { return linalg::isotropic_stiffness(lame_); }

  template <class Eps, class Int>
  auto omega(const Eps& eps, const Int&) const {
    using ad::square;
    const double lam = lame_.lambda;
    const double mu = lame_.mu;
    return (0.5 * lam) * square(eps[0] + eps[1] + eps[2]) +
           mu * (square(eps[0]) + square(eps[1]) + square(eps[2])) +
           (0.5 * mu) * (square(eps[3]) + square(eps[4]) + square(eps[5]));
  }

  // Never evaluated: there are no internal variables to drive.
  template <class Gen>
  double psi(const Gen&) const { return 0.0; }

  template <class S>
  VoigtVec<S> domega_deps(const VoigtVec<S>& eps, const SmallVec<S, 0>&) const {
    const S tr = eps(0) + eps(1) + eps(2);
    VoigtVec<S> sig;
    for (int i = 0; i < 3; ++i) sig(i) = lame_.lambda * tr + 2.0 * lame_.mu * eps(i);
    for (int i = 3; i < 6; ++i) sig(i) = lame_.mu * eps(i);
    return sig;
  }
  template <class S>
  SmallVec<S, 0> domega_da(const VoigtVec<S>&, const SmallVec<S, 0>&) const { return {}; }
  template <class S>
  SmallVec<S, 0> dpsi_dA(const SmallVec<S, 0>&) const { return {}; }

 private:
  linalg::Lame lame_;
};

}  // namespace gsmlab::gsm
