#pragma once

// LU with partial pivoting for small dense systems, generic over the scalar.
// Pivots are chosen on primal magnitudes.

#include <Eigen/Core>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "gsmlab/ad/dual.hpp"

namespace gsmlab::linalg {

class SingularMatrixError : public std::runtime_error {
 public:
  explicit SingularMatrixError(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr double kPivotTolerance = 1e-14;

template <class S, int N>
class SmallLu {
 public:
  using Matrix = Eigen::Matrix<S, N, N>;

  SmallLu() = default;
  explicit SmallLu(const Matrix& a) { compute(a); }

  SmallLu& compute(const Matrix& a) {
    lu_ = a;
    const Eigen::Index n = a.rows();
    double scale = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) scale = std::max(scale, std::abs(ad::primal(a(i, j))));
    for (Eigen::Index i = 0; i < n; ++i) perm_[static_cast<std::size_t>(i)] = static_cast<int>(i);

    for (Eigen::Index k = 0; k < n; ++k) {
      Eigen::Index p = k;
      double best = std::abs(ad::primal(lu_(k, k)));
      for (Eigen::Index i = k + 1; i < n; ++i) {
        const double mag = std::abs(ad::primal(lu_(i, k)));
        if (mag > best) {
          best = mag;
          p = i;
        }
      }
      if (!(best >= kPivotTolerance * scale) || best == 0.0)
        throw SingularMatrixError("lu: pivot " + std::to_string(best) + " below tolerance at column " +
                                  std::to_string(k));
      if (p != k) {
        lu_.row(k).swap(lu_.row(p));
        std::swap(perm_[static_cast<std::size_t>(k)], perm_[static_cast<std::size_t>(p)]);
      }
      const S inv = S(1.0) / lu_(k, k);
      for (Eigen::Index i = k + 1; i < n; ++i) {
        lu_(i, k) *= inv;
        const S l = lu_(i, k);
        for (Eigen::Index j = k + 1; j < n; ++j) lu_(i, j) -= l * lu_(k, j);
      }
    }
    return *this;
  }

  template <int Cols>
  Eigen::Matrix<S, N, Cols> solve(const Eigen::Matrix<S, N, Cols>& b) const {
    const Eigen::Index n = lu_.rows();
    Eigen::Matrix<S, N, Cols> x(n, b.cols());
    for (Eigen::Index i = 0; i < n; ++i) x.row(i) = b.row(perm_[static_cast<std::size_t>(i)]);
    for (Eigen::Index c = 0; c < b.cols(); ++c) {
      for (Eigen::Index i = 1; i < n; ++i)
        for (Eigen::Index j = 0; j < i; ++j) x(i, c) -= lu_(i, j) * x(j, c);
      for (Eigen::Index i = n - 1; i >= 0; --i) {
        for (Eigen::Index j = i + 1; j < n; ++j) x(i, c) -= lu_(i, j) * x(j, c);
        x(i, c) /= lu_(i, i);
      }
    }
    return x;
  }

 private:
  Matrix lu_;
  std::array<int, (N > 0 ? N : 16)> perm_{};
};

// x with A x = b.
template <class S, int N, int Cols>
Eigen::Matrix<S, N, Cols> lu_solve(const Eigen::Matrix<S, N, N>& a, const Eigen::Matrix<S, N, Cols>& b) {
  return SmallLu<S, N>(a).solve(b);
}

}  // namespace gsmlab::linalg
