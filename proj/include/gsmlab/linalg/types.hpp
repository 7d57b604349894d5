#pragma once

#include <Eigen/Core>

#include "gsmlab/ad/eigen_support.hpp"

namespace gsmlab {

// Voigt ordering (xx, yy, zz, yz, xz, xy). Strain-like vectors carry
// engineering shear (gamma = 2 eps_ij), stress-like vectors tensor shear.
template <class S = double>
using VoigtVec = Eigen::Matrix<S, 6, 1>;

template <class S = double>
using StiffnessMat = Eigen::Matrix<S, 6, 6>;

// Small dense matrices, m <= 16.
inline constexpr int kMaxSmall = 16;

template <class S, int Rows, int Cols>
using SmallMat = Eigen::Matrix<S, Rows, Cols>;

template <class S, int Rows>
using SmallVec = Eigen::Matrix<S, Rows, 1>;

// Runtime-sized internal state without heap allocation.
using StateVec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxSmall, 1>;
using SensitivityMat = Eigen::Matrix<double, Eigen::Dynamic, 6, Eigen::ColMajor, kMaxSmall, 6>;

}  // namespace gsmlab
