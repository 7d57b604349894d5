#include "gsmlab/gsm/conventional.hpp"

#include <cmath>

#include "gsmlab/linalg/voigt.hpp"

namespace gsmlab::gsm {

namespace {

constexpr int kMaxNewton = 50;

// Maps engineering strain to the tensor deviator of that strain.
StiffnessMat<> deviatoric_projector() {
  StiffnessMat<> p = StiffnessMat<>::Zero();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) p(i, j) = -1.0 / 3.0;
    p(i, i) = 2.0 / 3.0;
    p(i + 3, i + 3) = 0.5;
  }
  return p;
}

}  // namespace

ConventionalResult conventional_evaluate(const MichelSuquetParams& params, const VoigtVec<>& /*eps_n*/,
                                         const SmallVec<double, 7>& a_n, const VoigtVec<>& eps_np1, double h,
                                         bool want_tangent) {
  if (!(h >= 0.0)) throw std::invalid_argument("conventional_evaluate: negative time increment");
  const linalg::Lame lame = linalg::Lame::from_young(params.young, params.poisson);
  const StiffnessMat<> ce = linalg::isotropic_stiffness(lame);
  const double mu = lame.mu;
  const double hk = params.hardening;
  const double sy = params.yield_stress;
  const double sd = params.drag_stress;
  const double n = params.rate_exponent;
  const double e0 = params.ref_strain_rate;
  const double stiff = 3.0 * mu + hk;

  ConventionalResult out;
  out.state = a_n;
  const VoigtVec<> eps_vp = a_n.head<6>();
  const VoigtVec<> sig_trial = ce * (eps_np1 - eps_vp);

  // Relative stress xi = dev(sigma) - back stress, tensor components.
  VoigtVec<> xi = linalg::dev(sig_trial);
  for (int i = 0; i < 3; ++i) xi(i) -= (2.0 / 3.0) * hk * eps_vp(i);
  for (int i = 3; i < 6; ++i) xi(i) -= (1.0 / 3.0) * hk * eps_vp(i);
  const double q = std::sqrt(1.5 * (xi(0) * xi(0) + xi(1) * xi(1) + xi(2) * xi(2)) +
                             3.0 * (xi(3) * xi(3) + xi(4) * xi(4) + xi(5) * xi(5)));

  if (h == 0.0 || !(q > sy)) {
    out.stress = sig_trial;
    if (want_tangent) {
      out.tangent = ce;
      out.da_deps = SmallMat<double, 7, 6>::Zero();
    }
    return out;
  }

  // g(dp) = dp - h e0 ((q - stiff dp - sy) / sd)^n, increasing and concave on
  // [0, dp_max]; Newton from the left converges monotonically, the bracket
  // guards round-off.
  const double dp_max = (q - sy) / stiff;
  double lo = 0.0;
  double hi = dp_max;
  double dp = 0.0;
  double residual = 0.0;
  double r = 0.0;
  int it = 0;
  for (;; ++it) {
    const double over = std::max(q - stiff * dp - sy, 0.0) / sd;
    const double rate = h * e0 * std::pow(over, n);
    residual = dp - rate;
    r = h * e0 * (n / sd) * std::pow(over, n - 1.0);
    if (residual < 0.0) lo = dp;
    else hi = dp;
    if (std::abs(residual) <= 1e-14 * std::max(dp, 1e-300) || hi - lo <= 1e-16 * dp_max) break;
    if (it >= kMaxNewton) throw ReturnMappingError("conventional_evaluate: Newton did not converge", residual);
    double next = dp - residual / (1.0 + r * stiff);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    dp = next;
  }
  out.iterations = it;

  const VoigtVec<> dir = xi / q;  // tensor components, unit von Mises norm
  VoigtVec<> deps_vp;
  for (int i = 0; i < 3; ++i) deps_vp(i) = 1.5 * dp * dir(i);
  for (int i = 3; i < 6; ++i) deps_vp(i) = 3.0 * dp * dir(i);
  out.state.head<6>() += deps_vp;
  out.state(6) += dp;
  out.stress = ce * (eps_np1 - out.state.head<6>());

  if (want_tangent) {
    // d dp / d eps and d dir / d eps for engineering strain input.
    const Eigen::Matrix<double, 1, 6> ddp = (3.0 * mu * r / (1.0 + r * stiff)) * dir.transpose();
    const StiffnessMat<> ddir = (2.0 * mu * deviatoric_projector() - 3.0 * mu * dir * dir.transpose()) / q;
    StiffnessMat<> dvp = 1.5 * (dir * ddp + dp * ddir);
    dvp.bottomRows<3>() *= 2.0;
    SmallMat<double, 7, 6> da = SmallMat<double, 7, 6>::Zero();
    da.topRows<6>() = dvp;
    da.row(6) = ddp;
    out.da_deps = da;
    out.tangent = ce * (StiffnessMat<>::Identity() - dvp);
  }
  return out;
}

}  // namespace gsmlab::gsm
