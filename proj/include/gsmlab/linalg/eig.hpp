#pragma once

#include <Eigen/Core>
#include <stdexcept>

namespace gsmlab::linalg {

class EigenvalueError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Real parts of all eigenvalues of a small square matrix (m <= 16), sorted
// ascending. Only meant for checks; not tuned.
Eigen::VectorXd eig_real_parts(const Eigen::MatrixXd& a);

// Extremal eigenvalues of the symmetric part.
struct SymmetricBounds {
  double min;
  double max;
};
SymmetricBounds symmetric_bounds(const Eigen::MatrixXd& a);

}  // namespace gsmlab::linalg
