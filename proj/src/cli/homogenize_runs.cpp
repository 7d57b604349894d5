#include "gsmlab/cli/homogenize_runs.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include "gsmlab/homogenize/microstructure.hpp"
#include "gsmlab/homogenize/output.hpp"
#include "gsmlab/io/csv.hpp"

namespace gsmlab::cli {

std::string RunSpec::label() const {
  return std::string(odeint::to_string(integrator)) + "_" + std::string(evaluator::to_string(measure)) + "_" +
         std::to_string(steps);
}

std::vector<RunSpec> run_matrix(const ExperimentConfig& cfg) {
  std::vector<RunSpec> out;
  for (odeint::Integrator which : cfg.integrators) {
    if (which == odeint::Integrator::implicit_euler) {
      for (int steps : cfg.steps) out.push_back({which, odeint::ErrorMeasure::internal, steps});
      continue;
    }
    for (odeint::ErrorMeasure m : cfg.error_measures)
      for (int steps : cfg.steps) out.push_back({which, m, steps});
  }
  return out;
}

homogenize::VoxelGrid make_grid(const ExperimentConfig& cfg) {
  auto matrix = evaluator::make_michel_suquet("matrix", cfg.matrix);
  auto fiber = evaluator::make_linear_elastic("fiber", cfg.fiber_young, cfg.fiber_poisson);
  if (!cfg.geometry.empty()) {
    homogenize::Geometry g = homogenize::read_geometry(cfg.geometry);
    for (std::uint16_t id : g.ids)
      if (id > 1) throw io::ConfigError("geometry uses material id " + std::to_string(id) + "; only 0 and 1 exist");
    return homogenize::VoxelGrid::make(g.dims, {matrix, fiber}, std::move(g.ids));
  }
  return homogenize::VoxelGrid::make(cfg.grid, {matrix, fiber},
                                     homogenize::spherocylinder_fiber(cfg.grid, cfg.fiber_fraction, cfg.seed));
}

RunResult run_one(const ExperimentConfig& cfg, const RunSpec& spec, evaluator::ThreadPool& pool) {
  RunResult out{spec, {}, "ok"};
  try {
    homogenize::VoxelGrid grid = make_grid(cfg);
    homogenize::LoadingPath path = cfg.path;
    path.steps = spec.steps;
    homogenize::PathOptions opt;
    opt.update_reference = cfg.update_reference;
    opt.record_tangent = cfg.record_tangent;
    opt.scheme.tolerance = cfg.fft_tolerance;
    opt.scheme.bc_tolerance = cfg.bc_tolerance;
    opt.scheme.max_iterations = cfg.max_iterations;
    opt.scheme.chunk_size = cfg.chunk_size;
    out.series = homogenize::run_loading_path(grid, path, cfg.strategy_config(spec.integrator, spec.measure), pool, opt);
  } catch (const std::exception& e) {
    out.status = e.what();
  }
  return out;
}

double sigma_xx_at(const std::vector<homogenize::PathStep>& series, double t) {
  // the virgin state at t = 0 carries no stress
  double t0 = 0.0, s0 = 0.0;
  for (const auto& p : series) {
    if (p.time == t) return p.stress(0);
    if (p.time > t) return s0 + (p.stress(0) - s0) * (t - t0) / (p.time - t0);
    t0 = p.time;
    s0 = p.stress(0);
  }
  throw std::invalid_argument("sigma_xx_at: time beyond the series");
}

Deviation sigma_xx_deviation(const std::vector<homogenize::PathStep>& coarse,
                             const std::vector<homogenize::PathStep>& fine) {
  if (coarse.empty() || fine.empty()) throw std::invalid_argument("sigma_xx_deviation: empty series");
  Deviation d;
  for (std::size_t k = 0; k < coarse.size(); ++k) {
    const double dev = std::abs(coarse[k].stress(0) - sigma_xx_at(fine, coarse[k].time));
    if (dev > d.max_abs || k == 0) {
      d.max_abs = dev;
      d.step = coarse[k].step;
      d.time = coarse[k].time;
    }
  }
  return d;
}

void write_summary_csv(std::ostream& out, const std::vector<RunResult>& runs) {
  std::map<std::pair<int, int>, const RunResult*> finest;
  for (const auto& r : runs) {
    if (r.status != "ok") continue;
    const auto key = std::make_pair(static_cast<int>(r.spec.integrator), static_cast<int>(r.spec.measure));
    auto it = finest.find(key);
    if (it == finest.end() || it->second->spec.steps < r.spec.steps) finest[key] = &r;
  }
  io::CsvWriter w(out, {"integrator", "error_measure", "steps", "reference_steps", "max_abs_dev_sig_xx", "peak_step",
                        "peak_time", "max_abs_sig_xx", "total_iterations", "mean_substeps", "status"});
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : runs) {
    w << odeint::to_string(r.spec.integrator) << evaluator::to_string(r.spec.measure) << r.spec.steps;
    const auto it = finest.find({static_cast<int>(r.spec.integrator), static_cast<int>(r.spec.measure)});
    Deviation d{nan, 0, nan};
    int ref_steps = 0;
    std::string status = r.status;
    if (r.status == "ok" && it != finest.end()) {
      ref_steps = it->second->spec.steps;
      try {
        d = sigma_xx_deviation(r.series, it->second->series);
      } catch (const std::exception& e) {
        status = e.what();
      }
    }
    double peak = 0.0, substeps = 0.0;
    int iterations = 0;
    for (const auto& s : r.series) {
      peak = std::max(peak, std::abs(s.stress(0)));
      iterations += s.iterations;
      substeps += s.mean_substeps;
    }
    for (char& c : status)
      if (c == ',' || c == '\n') c = ';';
    w << ref_steps << d.max_abs << d.step << d.time << peak << iterations
      << (r.series.empty() ? nan : substeps / static_cast<double>(r.series.size())) << status;
    w.end_row();
  }
}

std::vector<RunResult> run_homogenize(const ExperimentConfig& cfg) {
  cfg.validate();
  std::filesystem::create_directories(cfg.out);
  {
    std::ofstream c(cfg.out / (cfg.experiment + "_config.txt"));
    c << cfg.to_text();
  }
  evaluator::ThreadPool pool(cfg.threads);
  std::vector<RunResult> runs;
  for (const RunSpec& spec : run_matrix(cfg)) {
    runs.push_back(run_one(cfg, spec, pool));
    std::ofstream f(cfg.out / (cfg.experiment + "_" + spec.label() + ".csv"));
    homogenize::write_path_csv(f, runs.back().series);
    if (!f) throw std::runtime_error("cannot write " + (cfg.out / (cfg.experiment + "_" + spec.label() + ".csv")).string());
  }
  std::ofstream s(cfg.out / (cfg.experiment + "_summary.csv"));
  write_summary_csv(s, runs);
  if (!s) throw std::runtime_error("cannot write the summary CSV");
  return runs;
}

}  // namespace gsmlab::cli
