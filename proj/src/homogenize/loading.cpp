#include "gsmlab/homogenize/loading.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace gsmlab::homogenize {

namespace {

std::array<double, 3> segment_durations(const LoadingPath& p) {
  return {p.upper / p.rate, (p.upper - p.lower) / p.rate, -p.lower / p.rate};
}

}  // namespace

void LoadingPath::validate() const {
  if (steps < 1) throw std::invalid_argument("loading path needs at least one step");
  if (!(upper >= 0.0) || !(lower <= 0.0)) throw std::invalid_argument("loading path needs lower <= 0 <= upper");
  if (!(rate > 0.0)) throw std::invalid_argument("loading path strain rate must be positive");
  int segments = 0;
  for (double d : segment_durations(*this)) segments += d > 0.0;
  if (steps < segments) throw std::invalid_argument("loading path needs a step per monotone segment");
}

std::array<int, 3> LoadingPath::segment_steps() const {
  const auto d = segment_durations(*this);
  const double total = d[0] + d[1] + d[2];
  if (total == 0.0) return {steps, 0, 0};
  // largest remainder, at least one step per non-empty segment
  std::array<int, 3> n{};
  std::array<double, 3> rest{};
  int used = 0;
  for (std::size_t s = 0; s < 3; ++s) {
    const double share = steps * d[s] / total;
    n[s] = d[s] > 0.0 ? std::max(1, static_cast<int>(std::floor(share))) : 0;
    rest[s] = d[s] > 0.0 ? share - n[s] : -1.0;
    used += n[s];
  }
  while (used < steps) {
    std::size_t best = 0;
    for (std::size_t s = 1; s < 3; ++s)
      if (rest[s] > rest[best]) best = s;
    ++n[best];
    rest[best] -= 1.0;
    ++used;
  }
  while (used > steps) {
    std::size_t worst = 3;
    for (std::size_t s = 0; s < 3; ++s)
      if (n[s] > 1 && (worst == 3 || rest[s] < rest[worst])) worst = s;
    --n[worst];
    rest[worst] += 1.0;
    --used;
  }
  return n;
}

double LoadingPath::total_time() const { return (2.0 * upper - 2.0 * lower) / rate; }

double LoadingPath::strain_at(double t) const {
  const double t1 = upper / rate;
  const double t2 = t1 + (upper - lower) / rate;
  if (t <= t1) return rate * t;
  if (t <= t2) return upper - rate * (t - t1);
  return std::min(0.0, lower + rate * (t - t2));
}

double LoadingPath::time_at(int step) const {
  if (step < 0 || step > steps) throw std::out_of_range("loading path step out of range");
  const auto d = segment_durations(*this);
  const auto n = segment_steps();
  double start = 0.0;
  for (std::size_t s = 0; s < 3; ++s) {
    if (step <= n[s] && n[s] > 0) return step == n[s] ? start + d[s] : start + d[s] * step / n[s];
    step -= n[s];
    start += d[s];
  }
  return start;
}

double LoadingPath::strain_at_step(int step) const {
  if (step < 0 || step > steps) throw std::out_of_range("loading path step out of range");
  const auto n = segment_steps();
  const std::array<double, 4> corner{0.0, upper, lower, 0.0};
  for (std::size_t s = 0; s < 3; ++s) {
    if (step <= n[s] && n[s] > 0)
      return step == n[s] ? corner[s + 1] : corner[s] + (corner[s + 1] - corner[s]) * step / n[s];
    step -= n[s];
  }
  return 0.0;
}

ReferenceMaterial elastic_reference(const VoxelGrid& grid) {
  std::set<std::uint16_t> present(grid.ids.begin(), grid.ids.end());
  std::vector<StiffnessMat<>> cs;
  for (std::uint16_t id : present) cs.push_back(grid.materials[id]->elastic_stiffness());
  return reference_update(cs);
}

namespace {

std::vector<evaluator::EvalRequest> requests_for(const VoxelGrid& grid, double dt, const VoigtField& strain,
                                                 bool tangent) {
  std::vector<evaluator::EvalRequest> req(grid.dims.size());
  for (std::size_t i = 0; i < req.size(); ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    req[i].eps_n = grid.strain.col(c);
    req[i].a_n = grid.state[i];
    req[i].eps_np1 = strain.col(c);
    req[i].dt = dt;
    req[i].want_tangent = tangent;
  }
  return req;
}

}  // namespace

StiffnessMat<> tangent_sweep(const VoxelGrid& grid, const evaluator::StrategyConfig& cfg, double dt,
                             const VoigtField& strain, evaluator::ThreadPool& pool,
                             std::vector<StiffnessMat<>>* field, std::size_t chunk_size) {
  const auto req = requests_for(grid, dt, strain, true);
  const auto batch = evaluator::evaluate_batch(grid.field(), cfg, req, pool, chunk_size);
  if (!batch.ok())
    throw SolveError("tangent sweep failed at voxel " + std::to_string(batch.errors.front().index) + ": " +
                         batch.errors.front().message,
                     {});
  StiffnessMat<> mean = StiffnessMat<>::Zero();
  if (field) field->clear();
  for (const auto& r : batch.results) {
    mean += *r.tangent;
    if (field) field->push_back(*r.tangent);
  }
  return mean / static_cast<double>(batch.results.size());
}

std::vector<PathStep> run_loading_path(VoxelGrid& grid, const LoadingPath& path,
                                       const evaluator::StrategyConfig& cfg, evaluator::ThreadPool& pool,
                                       const PathOptions& opt) {
  path.validate();
  cfg.validate();
  BasicScheme scheme(grid.dims, pool);
  ReferenceMaterial ref = opt.reference ? *opt.reference : elastic_reference(grid);
  std::vector<PathStep> out;
  VoigtVec<> macro = grid.strain.rowwise().mean();
  VoigtVec<> last_increment = VoigtVec<>::Zero();

  for (int step = 1; step <= path.steps; ++step) {
    const double t0 = path.time_at(step - 1);
    const double t1 = path.time_at(step);
    const double dt = t1 - t0;
    const double exx = path.strain_at_step(step);
    const double dexx = exx - macro(0);

    // Predicted mean increment: the previous one rescaled, or the reference
    // medium's response for the first step.
    VoigtVec<> increment = VoigtVec<>::Zero();
    increment(0) = dexx;
    if (path.mixed) {
      if (last_increment(0) != 0.0) {
        increment = last_increment * (dexx / last_increment(0));
      } else {
        const StiffnessMat<> c0 = ref.stiffness();
        const Eigen::Matrix<double, 5, 5> cff = c0.bottomRightCorner<5, 5>();
        increment.tail<5>() = cff.ldlt().solve(Eigen::Matrix<double, 5, 1>(-c0.col(0).tail<5>() * dexx));
      }
    }
    VoigtField initial = grid.strain;
    initial.colwise() += increment;

    if (opt.update_reference) {
      std::vector<StiffnessMat<>> tangents;
      tangent_sweep(grid, cfg, dt, initial, pool, &tangents, opt.scheme.chunk_size);
      ref = reference_update(tangents);
    }
    VoigtVec<> target = macro + increment;
    target(0) = exx;
    const MacroLoad load =
        path.mixed ? MacroLoad::uniaxial(exx, target) : MacroLoad::strain_only((VoigtVec<>() << exx, 0, 0, 0, 0, 0).finished());
    SolveResult res = scheme.solve(grid, cfg, dt, load, ref, initial, opt.scheme);

    PathStep rec;
    rec.step = step;
    rec.time = t1;
    rec.eps_xx = exx;
    rec.stress = res.mean_stress;
    rec.iterations = res.iterations;
    double substeps = 0.0;
    for (const auto& r : res.results) substeps += r.substeps;
    rec.mean_substeps = substeps / static_cast<double>(res.results.size());
    if (opt.record_tangent) {
      const StiffnessMat<> c = tangent_sweep(grid, cfg, dt, res.strain, pool, nullptr, opt.scheme.chunk_size);
      rec.c11 = c(0, 0);
      rec.c12 = c(0, 1);
    } else {
      rec.c11 = rec.c12 = std::numeric_limits<double>::quiet_NaN();
    }

    last_increment = res.mean_strain - macro;
    macro = res.mean_strain;
    grid.strain = res.strain;
    for (std::size_t i = 0; i < grid.state.size(); ++i) grid.state[i] = res.results[i].a;
    out.push_back(rec);
  }
  return out;
}

}  // namespace gsmlab::homogenize
