#pragma once

// Elasto-viscoplastic GSM with linear kinematic hardening and a power-law
// force potential.
//
// Internal state a = (eps_vp (6, engineering shear), alpha).
//
//   omega(eps, a) = 1/2 (eps - eps_vp)^T C (eps - eps_vp)
//                 + 1/3 eps_vp^T Hm eps_vp + int_0^alpha K(q) dq,
//   Hm = diag(H, H, H, H/2, H/2, H/2)
//
//   psi(A) = sd e0 / (n + 1) * ((|dev A_vp|_mises + A_alpha)^+ / sd)^(n + 1)

#include <cmath>
#include <stdexcept>
#include <string>

#include "gsmlab/ad/reverse.hpp"
#include "gsmlab/linalg/types.hpp"
#include "gsmlab/linalg/voigt.hpp"

namespace gsmlab::gsm {

struct MichelSuquetParams {
  double young = 55e9;           // Pa
  double poisson = 0.33;         // 1
  double yield_stress = 25e6;    // Pa
  double hardening = 1.8e9;      // Pa, kinematic modulus H
  double ref_strain_rate = 1.0;  // 1/s
  double drag_stress = 130e6;    // Pa
  double rate_exponent = 3.6;    // 1

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0)) throw std::invalid_argument(std::string("MichelSuquetParams: ") + name + " must be positive");
    };
    positive(young, "E");
    positive(poisson, "nu");
    positive(yield_stress, "sigma_Y");
    positive(hardening, "H");
    positive(ref_strain_rate, "eps0_dot");
    positive(drag_stress, "sigma_d");
    positive(rate_exponent, "n");
    if (!(poisson < 0.5)) throw std::invalid_argument("MichelSuquetParams: nu must be below 0.5");
  }
};

// K(alpha) == sigma_Y.
struct ConstantHardening {
  double yield_stress;

  template <class E>
  auto stored_energy(const E& alpha) const { return yield_stress * alpha; }
  template <class S>
  S yield(const S&) const { return S(yield_stress); }
};

template <class Hardening = ConstantHardening>
class MichelSuquet {
 public:
  static constexpr int kInternal = 7;
  static constexpr bool kHasHandPartials = true;
  static constexpr bool kHasConventional = true;

  explicit MichelSuquet(const MichelSuquetParams& p)
      : MichelSuquet(p, Hardening{p.yield_stress}) {}
  MichelSuquet(const MichelSuquetParams& p, Hardening hardening)
      : params_(p), lame_(linalg::Lame::from_young(p.young, p.poisson)), hardening_(hardening) {
    p.validate();
  }

  const MichelSuquetParams& params() const { return params_; }
  const linalg::Lame& lame() const { return lame_; }
  StiffnessMat<> elastic_stiffness() const { return linalg::isotropic_stiffness(lame_); }

  // Free energy. Works on plain scalars and on reverse-expression leaves.
  template <class Eps, class Int>
  auto omega(const Eps& eps, const Int& a) const {
    using ad::square;
    const double lam = lame_.lambda;
    const double mu = lame_.mu;
    const double h = params_.hardening;
    auto e0 = eps[0] - a[0];
    auto e1 = eps[1] - a[1];
    auto e2 = eps[2] - a[2];
    auto e3 = eps[3] - a[3];
    auto e4 = eps[4] - a[4];
    auto e5 = eps[5] - a[5];
    auto elastic = (0.5 * lam) * square(e0 + e1 + e2) + mu * (square(e0) + square(e1) + square(e2)) +
                   (0.5 * mu) * (square(e3) + square(e4) + square(e5));
    auto kinematic = (h / 3.0) * (square(a[0]) + square(a[1]) + square(a[2])) +
                     (h / 6.0) * (square(a[3]) + square(a[4]) + square(a[5]));
    return elastic + kinematic + hardening_.stored_energy(a[6]);
  }

  template <class Gen>
  auto psi(const Gen& big_a) const {
    using ad::pos;
    using ad::square;
    using std::pow;
    using std::sqrt;
    const double sd = params_.drag_stress;
    const double n = params_.rate_exponent;
    auto mean = (big_a[0] + big_a[1] + big_a[2]) / 3.0;
    auto q = 1.5 * (square(big_a[0] - mean) + square(big_a[1] - mean) + square(big_a[2] - mean)) +
             3.0 * (square(big_a[3]) + square(big_a[4]) + square(big_a[5]));
    auto over = pos((sqrt(q) + big_a[6]) / sd);
    return (sd * params_.ref_strain_rate / (n + 1.0)) * pow(over, n + 1.0);
  }

  // ---- hand-coded partials ----------------------------------------------

  template <class S>
  VoigtVec<S> domega_deps(const VoigtVec<S>& eps, const SmallVec<S, 7>& a) const {
    return elastic_stress(eps, a);
  }

  template <class S>
  SmallVec<S, 7> domega_da(const VoigtVec<S>& eps, const SmallVec<S, 7>& a) const {
    const VoigtVec<S> sig = elastic_stress(eps, a);
    const double h = params_.hardening;
    SmallVec<S, 7> g;
    for (int i = 0; i < 3; ++i) g(i) = (2.0 * h / 3.0) * a(i) - sig(i);
    for (int i = 3; i < 6; ++i) g(i) = (h / 3.0) * a(i) - sig(i);
    g(6) = hardening_.yield(a(6));
    return g;
  }

  template <class S>
  SmallVec<S, 7> dpsi_dA(const SmallVec<S, 7>& big_a) const {
    using ad::pos;
    using std::pow;
    using std::sqrt;
    const double sd = params_.drag_stress;
    const double n = params_.rate_exponent;
    SmallVec<S, 7> g = SmallVec<S, 7>::Zero();
    const S mean = (big_a(0) + big_a(1) + big_a(2)) / 3.0;
    const S d0 = big_a(0) - mean, d1 = big_a(1) - mean, d2 = big_a(2) - mean;
    const S q = 1.5 * (d0 * d0 + d1 * d1 + d2 * d2) +
                3.0 * (big_a(3) * big_a(3) + big_a(4) * big_a(4) + big_a(5) * big_a(5));
    if (!(ad::primal(q) > 0.0)) return g;
    const S norm = sqrt(q);
    const S over = norm + big_a(6);
    if (!(ad::primal(over) > 0.0)) return g;
    const S rate = params_.ref_strain_rate * pow(over / sd, n);
    const S scaled = rate / norm;
    g(0) = 1.5 * scaled * d0;
    g(1) = 1.5 * scaled * d1;
    g(2) = 1.5 * scaled * d2;
    g(3) = 3.0 * scaled * big_a(3);
    g(4) = 3.0 * scaled * big_a(4);
    g(5) = 3.0 * scaled * big_a(5);
    g(6) = rate;
    return g;
  }

 private:
  template <class S>
  VoigtVec<S> elastic_stress(const VoigtVec<S>& eps, const SmallVec<S, 7>& a) const {
    VoigtVec<S> e;
    for (int i = 0; i < 6; ++i) e(i) = eps(i) - a(i);
    const S tr = e(0) + e(1) + e(2);
    VoigtVec<S> sig;
    for (int i = 0; i < 3; ++i) sig(i) = lame_.lambda * tr + 2.0 * lame_.mu * e(i);
    for (int i = 3; i < 6; ++i) sig(i) = lame_.mu * e(i);
    return sig;
  }

  MichelSuquetParams params_;
  linalg::Lame lame_;
  Hardening hardening_;
};

}  // namespace gsmlab::gsm
