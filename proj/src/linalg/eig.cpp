#include "gsmlab/linalg/eig.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>

namespace gsmlab::linalg {

Eigen::VectorXd eig_real_parts(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw EigenvalueError("eig_real_parts: matrix not square");
  if (a.rows() > 16) throw EigenvalueError("eig_real_parts: matrix larger than 16x16");
  if (a.rows() == 0) return {};
  Eigen::EigenSolver<Eigen::MatrixXd> solver;
  solver.setMaxIterations(200);
  solver.compute(a, false);
  if (solver.info() != Eigen::Success) throw EigenvalueError("eig_real_parts: QR iteration did not converge");
  Eigen::VectorXd re = solver.eigenvalues().real();
  std::sort(re.data(), re.data() + re.size());
  return re;
}

SymmetricBounds symmetric_bounds(const Eigen::MatrixXd& a) {
  const Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw EigenvalueError("symmetric_bounds: solver failed");
  return {solver.eigenvalues().minCoeff(), solver.eigenvalues().maxCoeff()};
}

}  // namespace gsmlab::linalg
