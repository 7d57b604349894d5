#include "gsmlab/homogenize/solver.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "gsmlab/linalg/voigt.hpp"

namespace gsmlab::homogenize {

namespace {

double tensor_norm(const VoigtVec<>& s) {
  return std::sqrt(s.head<3>().squaredNorm() + 2.0 * s.tail<3>().squaredNorm());
}

}  // namespace

VoxelGrid VoxelGrid::make(const GridDims& dims, std::vector<std::shared_ptr<const evaluator::Material>> materials,
                          std::vector<std::uint16_t> ids) {
  dims.validate();
  if (ids.size() != dims.size()) throw std::invalid_argument("VoxelGrid: material ids do not match the grid");
  VoxelGrid g;
  g.dims = dims;
  g.materials = std::move(materials);
  g.ids = std::move(ids);
  g.field().validate();
  g.strain = VoigtField::Zero(6, static_cast<Eigen::Index>(dims.size()));
  g.state.reserve(dims.size());
  for (std::uint16_t id : g.ids) g.state.push_back(g.materials[id]->initial_state());
  return g;
}

double VoxelGrid::volume_fraction(std::uint16_t id) const {
  return static_cast<double>(std::count(ids.begin(), ids.end(), id)) / static_cast<double>(ids.size());
}

double equilibrium_residual(const SpectralField& s, const GridDims& dims) {
  const double n = static_cast<double>(dims.size());
  double sum = 0.0;
  for (int z = 0; z < dims.nz; ++z)
    for (int y = 0; y < dims.ny; ++y)
      for (int x = 0; x < dims.nx; ++x) {
        const auto dir = wave_direction(dims, x, y, z);
        if (!dir) continue;
        const std::size_t i = dims.index(x, y, z);
        const Eigen::Vector3d& d = *dir;
        const std::complex<double> t0 = s[0][i] * d(0) + s[5][i] * d(1) + s[4][i] * d(2);
        const std::complex<double> t1 = s[5][i] * d(0) + s[1][i] * d(1) + s[3][i] * d(2);
        const std::complex<double> t2 = s[4][i] * d(0) + s[3][i] * d(1) + s[2][i] * d(2);
        sum += std::norm(t0) + std::norm(t1) + std::norm(t2);
      }
  const double fluct = std::sqrt(sum) / n;
  if (fluct == 0.0) return 0.0;
  VoigtVec<> mean;
  for (int r = 0; r < 6; ++r) mean(r) = s[static_cast<std::size_t>(r)][0].real() / n;
  double scale = tensor_norm(mean);
  if (scale == 0.0) {
    // no mean stress: relative to the field's L2 norm (Parseval)
    double all = 0.0;
    for (std::size_t i = 0; i < dims.size(); ++i)
      for (int r = 0; r < 6; ++r) all += (r < 3 ? 1.0 : 2.0) * std::norm(s[static_cast<std::size_t>(r)][i]);
    scale = std::sqrt(all) / n;
  }
  return fluct / scale;
}

BasicScheme::BasicScheme(const GridDims& dims, evaluator::ThreadPool& pool)
    : dims_(dims), pool_(&pool), fft_(dims) {
  directions_.resize(dims.size());
  for (int z = 0; z < dims.nz; ++z)
    for (int y = 0; y < dims.ny; ++y)
      for (int x = 0; x < dims.nx; ++x) directions_[dims.index(x, y, z)] = wave_direction(dims, x, y, z);
}

SolveResult BasicScheme::solve(const VoxelGrid& grid, const evaluator::StrategyConfig& cfg, double dt,
                               const MacroLoad& load, const ReferenceMaterial& ref, const VoigtField& initial,
                               const SchemeOptions& opt) {
  if (!(grid.dims == dims_)) throw std::invalid_argument("BasicScheme: grid dimensions differ");
  ref.validate();
  const std::size_t n = dims_.size();
  const auto cols = static_cast<Eigen::Index>(n);
  if (initial.cols() != cols) throw std::invalid_argument("BasicScheme: initial strain has the wrong size");
  const evaluator::MaterialField field = grid.field();

  std::vector<int> free;
  for (int r = 0; r < 6; ++r)
    if (!load.strain_controlled[static_cast<std::size_t>(r)]) free.push_back(r);
  const StiffnessMat<> c0 = ref.stiffness();
  Eigen::MatrixXd c0_free(free.size(), free.size());
  for (std::size_t i = 0; i < free.size(); ++i)
    for (std::size_t j = 0; j < free.size(); ++j) c0_free(i, j) = c0(free[i], free[j]);
  const Eigen::LDLT<Eigen::MatrixXd> c0_free_ldlt(c0_free);

  // Mean strain: controlled components from the load, free ones from the initial field.
  VoigtVec<> macro = initial.rowwise().mean();
  for (int r = 0; r < 6; ++r)
    if (load.strain_controlled[static_cast<std::size_t>(r)]) macro(r) = load.strain(r);

  std::vector<evaluator::EvalRequest> requests(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& q = requests[i];
    q.eps_n = grid.strain.col(static_cast<Eigen::Index>(i));
    q.a_n = grid.state[i];
    q.dt = dt;
    q.want_tangent = false;
  }

  std::vector<evaluator::StepRecord> records, previous;
  SolveResult out;
  out.strain = initial;
  SpectralField eps_hat, sig_hat;
  std::vector<double> comp(n);
  for (int r = 0; r < 6; ++r) {
    auto& e = eps_hat[static_cast<std::size_t>(r)];
    e.resize(n);
    sig_hat[static_cast<std::size_t>(r)].resize(n);
    for (std::size_t i = 0; i < n; ++i) comp[i] = initial(r, static_cast<Eigen::Index>(i));
    fft_.forward(comp.data(), e.data());
  }
  // Put the mean on the target right away.
  auto impose_mean = [&] {
    for (int r = 0; r < 6; ++r) eps_hat[static_cast<std::size_t>(r)][0] = macro(r) * static_cast<double>(n);
  };
  auto back_transform = [&] {
    for (int r = 0; r < 6; ++r) {
      fft_.inverse(eps_hat[static_cast<std::size_t>(r)].data(), comp.data());
      for (std::size_t i = 0; i < n; ++i) out.strain(r, static_cast<Eigen::Index>(i)) = comp[i];
    }
  };
  impose_mean();
  back_transform();

  out.stress.resize(6, cols);
  while (true) {
    if (out.iterations >= opt.max_iterations)
      throw SolveError("basic scheme did not converge in " + std::to_string(opt.max_iterations) + " iterations",
                       out.residuals);
    for (std::size_t i = 0; i < n; ++i) requests[i].eps_np1 = out.strain.col(static_cast<Eigen::Index>(i));
    evaluator::BatchResult batch =
        evaluator::evaluate_batch(field, cfg, requests, *pool_, opt.chunk_size, &records);
    if (opt.warm_start) {
      std::swap(records, previous);
      for (std::size_t i = 0; i < n; ++i) requests[i].warm_start = &previous[i];
    }
    ++out.iterations;
    if (!batch.ok())
      throw SolveError("material evaluation failed at voxel " + std::to_string(batch.errors.front().index) + ": " +
                           batch.errors.front().message,
                       out.residuals);
    for (std::size_t i = 0; i < n; ++i) out.stress.col(static_cast<Eigen::Index>(i)) = batch.results[i].stress;
    const VoigtVec<> mean_stress = out.stress.rowwise().mean();

    for (int r = 0; r < 6; ++r) {
      for (std::size_t i = 0; i < n; ++i) comp[i] = out.stress(r, static_cast<Eigen::Index>(i));
      fft_.forward(comp.data(), sig_hat[static_cast<std::size_t>(r)].data());
    }
    const double residual = equilibrium_residual(sig_hat, dims_);
    out.residuals.push_back(residual);
    double free_norm = 0.0;
    for (int r : free) free_norm += (r < 3 ? 1.0 : 2.0) * mean_stress(r) * mean_stress(r);
    free_norm = std::sqrt(free_norm);
    const double mean_norm = tensor_norm(mean_stress);
    const bool bc_ok = free_norm <= opt.bc_tolerance * mean_norm || free_norm == 0.0;
    if (!std::isfinite(residual)) throw SolveError("basic scheme produced a non-finite stress field", out.residuals);
    if (residual <= opt.tolerance && bc_ok) {
      out.mean_stress = mean_stress;
      out.mean_strain = macro;
      out.results = std::move(batch.results);
      return out;
    }

    if (!free.empty()) {
      Eigen::VectorXd rhs(free.size());
      for (std::size_t j = 0; j < free.size(); ++j) rhs(static_cast<Eigen::Index>(j)) = -mean_stress(free[j]);
      const Eigen::VectorXd d = c0_free_ldlt.solve(rhs);
      for (std::size_t j = 0; j < free.size(); ++j) macro(free[j]) += d(static_cast<Eigen::Index>(j));
    }
    for (std::size_t i = 1; i < n; ++i) {
      const auto& dir = directions_[i];
      if (!dir) {
        for (int r = 0; r < 6; ++r) eps_hat[static_cast<std::size_t>(r)][i] = 0.0;
        continue;
      }
      ComplexVoigt s;
      for (int r = 0; r < 6; ++r) s(r) = sig_hat[static_cast<std::size_t>(r)][i];
      const ComplexVoigt de = green_frequency(*dir, ref, s);
      for (int r = 0; r < 6; ++r) eps_hat[static_cast<std::size_t>(r)][i] -= de(r);
    }
    impose_mean();
    back_transform();
  }
}

ModuliBounds moduli_bounds(const StiffnessMat<>& c) {
  if (!c.allFinite()) throw std::invalid_argument("reference_update: non-finite tangent");
  const StiffnessMat<> m = linalg::to_mandel(c);
  const StiffnessMat<> sym = 0.5 * (m + m.transpose());
  VoigtVec<> v = VoigtVec<>::Zero();
  v.head<3>().setConstant(1.0 / std::sqrt(3.0));
  const double bulk = v.dot(sym * v) / 3.0;
  // orthonormal basis of the deviatoric subspace
  const Eigen::Matrix<double, 6, 6> proj = Eigen::Matrix<double, 6, 6>::Identity() - v * v.transpose();
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> ps(proj);
  const Eigen::Matrix<double, 6, 5> basis = ps.eigenvectors().rightCols<5>();
  const Eigen::Matrix<double, 5, 5> dev = basis.transpose() * sym * basis;
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 5, 5>> es(dev, Eigen::EigenvaluesOnly);
  return {bulk, 0.5 * es.eigenvalues().minCoeff(), 0.5 * es.eigenvalues().maxCoeff()};
}

ReferenceMaterial reference_update(const std::vector<StiffnessMat<>>& tangents) {
  if (tangents.empty()) throw std::invalid_argument("reference_update: empty tangent field");
  double k_min = std::numeric_limits<double>::infinity(), k_max = -k_min;
  double mu_min = k_min, mu_max = -k_min;
  for (const auto& c : tangents) {
    const ModuliBounds b = moduli_bounds(c);
    k_min = std::min(k_min, b.bulk);
    k_max = std::max(k_max, b.bulk);
    mu_min = std::min(mu_min, b.mu_min);
    mu_max = std::max(mu_max, b.mu_max);
  }
  const double k = 0.5 * (k_min + k_max);
  const double mu = 0.5 * (mu_min + mu_max);
  ReferenceMaterial ref{k - 2.0 / 3.0 * mu, mu};
  ref.validate();
  return ref;
}

}  // namespace gsmlab::homogenize
