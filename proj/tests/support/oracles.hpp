#pragma once

// Independent reference computations for the unit and acceptance tests:
// central finite differences, 3x3 tensor forms and random state generators.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <random>

#include "gsmlab/gsm/michel_suquet.hpp"
#include "gsmlab/linalg/types.hpp"

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Central difference gradient of a scalar function with per-component steps.
template <class F>
VectorXd fd_gradient(F&& f, const VectorXd& x, const VectorXd& step) {
  VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    VectorXd xp = x, xm = x;
    xp(i) += step(i);
    xm(i) -= step(i);
    g(i) = (f(xp) - f(xm)) / (2.0 * step(i));
  }
  return g;
}

// Central difference Jacobian of a vector map.
template <class F>
MatrixXd fd_jacobian(F&& f, const VectorXd& x, const VectorXd& step) {
  const VectorXd f0 = f(x);
  MatrixXd j(f0.size(), x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    VectorXd xp = x, xm = x;
    xp(i) += step(i);
    xm(i) -= step(i);
    j.col(i) = (f(xp) - f(xm)) / (2.0 * step(i));
  }
  return j;
}

// Mixed second partial d^2 f / dx_i dx_j by nested central differences.
template <class F>
double fd_mixed(F&& f, const VectorXd& x, Eigen::Index i, Eigen::Index j, double hi, double hj) {
  auto shifted = [&](double si, double sj) {
    VectorXd y = x;
    y(i) += si;
    y(j) += sj;
    return f(y);
  };
  if (i == j) return (shifted(hi, 0) - 2.0 * f(x) + shifted(-hi, 0)) / (hi * hi);
  return (shifted(hi, hj) - shifted(hi, -hj) - shifted(-hi, hj) + shifted(-hi, -hj)) / (4.0 * hi * hj);
}

inline double rel_err(const MatrixXd& got, const MatrixXd& want, double floor = 0.0) {
  const double scale = std::max(want.cwiseAbs().maxCoeff(), floor);
  if (scale == 0.0) return got.cwiseAbs().maxCoeff();
  return (got - want).cwiseAbs().maxCoeff() / scale;
}

// Voigt stress-like vector to the symmetric 3x3 tensor.
inline Eigen::Matrix3d stress_tensor(const gsmlab::VoigtVec<>& s) {
  Eigen::Matrix3d t;
  t << s(0), s(5), s(4), s(5), s(1), s(3), s(4), s(3), s(2);
  return t;
}

inline double mises_tensor(const gsmlab::VoigtVec<>& s) {
  const Eigen::Matrix3d t = stress_tensor(s);
  const Eigen::Matrix3d d = t - t.trace() / 3.0 * Eigen::Matrix3d::Identity();
  return std::sqrt(1.5 * (d.array() * d.array()).sum());
}

struct MsState {
  gsmlab::VoigtVec<> eps;
  gsmlab::SmallVec<double, 7> a;
};

// Random Michel-Suquet state: strains of magnitude `strain`, deviatoric
// viscoplastic strain, non-negative equivalent plastic strain.
inline MsState random_ms_state(std::mt19937_64& rng, double strain = 4e-3) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MsState s;
  for (int i = 0; i < 6; ++i) s.eps(i) = strain * u(rng);
  for (int i = 0; i < 6; ++i) s.a(i) = 0.5 * strain * u(rng);
  const double mean = (s.a(0) + s.a(1) + s.a(2)) / 3.0;
  for (int i = 0; i < 3; ++i) s.a(i) -= mean;
  s.a(6) = strain * (1.0 + u(rng));
  return s;
}

// Generalized stress vector of the Michel-Suquet law, written directly from
// the tensor form: A_vp = sigma - (2/3) H eps_vp (tensor shear), A_alpha = -sigma_Y.
inline gsmlab::SmallVec<double, 7> ms_generalized_stress(const gsmlab::gsm::MichelSuquetParams& p,
                                                         const MsState& s) {
  const double lam = p.young * p.poisson / ((1 + p.poisson) * (1 - 2 * p.poisson));
  const double mu = p.young / (2 * (1 + p.poisson));
  Eigen::Matrix3d e, evp;
  auto tensor_strain = [](const gsmlab::VoigtVec<>& v) {
    Eigen::Matrix3d t;
    t << v(0), v(5) / 2, v(4) / 2, v(5) / 2, v(1), v(3) / 2, v(4) / 2, v(3) / 2, v(2);
    return t;
  };
  e = tensor_strain(s.eps);
  evp = tensor_strain(s.a.head<6>());
  const Eigen::Matrix3d ee = e - evp;
  const Eigen::Matrix3d sig = lam * ee.trace() * Eigen::Matrix3d::Identity() + 2 * mu * ee;
  const Eigen::Matrix3d big = sig - (2.0 / 3.0) * p.hardening * evp;
  gsmlab::SmallVec<double, 7> out;
  out << big(0, 0), big(1, 1), big(2, 2), big(1, 2), big(0, 2), big(0, 1), -p.yield_stress;
  return out;
}

// Closed-form flow rule from the tensor generalized stress.
inline gsmlab::SmallVec<double, 7> ms_flow(const gsmlab::gsm::MichelSuquetParams& p,
                                           const gsmlab::SmallVec<double, 7>& big) {
  gsmlab::SmallVec<double, 7> f = gsmlab::SmallVec<double, 7>::Zero();
  const double q = mises_tensor(big.head<6>());
  const double over = q + big(6);
  if (!(over > 0.0)) return f;
  const double rate = p.ref_strain_rate * std::pow(over / p.drag_stress, p.rate_exponent);
  Eigen::Matrix3d t = stress_tensor(big.head<6>());
  const Eigen::Matrix3d d = t - t.trace() / 3.0 * Eigen::Matrix3d::Identity();
  const Eigen::Matrix3d flow = rate * 1.5 * d / q;
  f << flow(0, 0), flow(1, 1), flow(2, 2), 2 * flow(1, 2), 2 * flow(0, 2), 2 * flow(0, 1), rate;
  return f;
}

}  // namespace oracle
