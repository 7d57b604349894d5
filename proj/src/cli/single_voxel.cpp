#include "gsmlab/cli/single_voxel.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "gsmlab/io/csv.hpp"
#include "gsmlab/odeint/implicit_euler.hpp"
#include "gsmlab/odeint/system.hpp"

namespace gsmlab::cli {

namespace {

using Law = gsm::MichelSuquet<>;
using Mat56 = Eigen::Matrix<double, 5, 6>;

struct Response {
  VoigtVec<> stress;
  StiffnessMat<> tangent;
};

// Free-strain direction d eps / d eps_xx that keeps the five other stresses at zero.
VoigtVec<> mixed_direction(const StiffnessMat<>& c) {
  VoigtVec<> d;
  d(0) = 1.0;
  d.tail<5>() = c.bottomRightCorner<5, 5>().partialPivLu().solve(Eigen::Matrix<double, 5, 1>(-c.col(0).tail<5>()));
  return d;
}

// Newton on the free strains. `eval(eps)` returns stress and consistent tangent.
template <class F>
std::pair<VoigtVec<>, int> solve_mixed(F&& eval, VoigtVec<> eps, double scale) {
  constexpr int kMaxIterations = 40;
  double last = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= kMaxIterations; ++it) {
    const Response r = eval(eps);
    const double res = r.stress.tail<5>().norm();
    const double tol = 1e-12 * std::max(r.stress.norm(), scale);
    if (res <= tol) return {eps, it};
    // round-off floor: no further progress
    if (res >= last && res <= 1e3 * tol) return {eps, it};
    last = res;
    eps.tail<5>() -= r.tangent.bottomRightCorner<5, 5>().partialPivLu().solve(
        Eigen::Matrix<double, 5, 1>(r.stress.tail<5>()));
  }
  throw std::runtime_error("mixed boundary conditions: Newton did not converge");
}

VoigtVec<> elastic_guess(const StiffnessMat<>& c_el, const VoigtVec<>& eps_n, double exx) {
  VoigtVec<> e = eps_n;
  e += (exx - eps_n(0)) * mixed_direction(c_el);
  e(0) = exx;
  return e;
}

enum class Method { single, adaptive, reference };

struct LocalStep {
  VoigtVec<> stress;
  StiffnessMat<> tangent;
  SmallVec<double, 7> a;
  SmallMat<double, 7, 6> da;
};

LocalStep local_step(const Law& law, Method method, const odeint::StepController& ctl,
                     const odeint::StepController& ref_ctl, const VoigtVec<>& eps_n, const SmallVec<double, 7>& a_n,
                     const VoigtVec<>& eps_np1, double dt) {
  const odeint::GsmSystem<Law> sys(law, gsm::Partials::hand, eps_n, eps_np1, dt);
  odeint::ImplicitEulerResult<odeint::GsmSystem<Law>> r;
  switch (method) {
    case Method::single:
      r = odeint::implicit_euler_step(sys, a_n, true);
      break;
    case Method::adaptive:
      r = odeint::implicit_euler_adaptive(sys, a_n, true, ctl);
      break;
    case Method::reference:
      r = odeint::implicit_euler_adaptive(sys, a_n, true, ref_ctl);
      break;
  }
  LocalStep out;
  out.a = r.y;
  out.da = *r.dy_dp;
  std::tie(out.stress, out.tangent) = gsm::stress_with_tangent(law, gsm::Partials::hand, eps_np1, out.a, out.da);
  return out;
}

// d eps_vp,xx / d eps_xx at the end of the step
double flow_derivative(const LocalStep& s) { return s.da(0, 0); }

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2) return *mid;
  return 0.5 * (*mid + *std::max_element(v.begin(), mid));
}

}  // namespace

std::vector<VoxelStep> single_voxel_path(const evaluator::Material& mat, const evaluator::StrategyConfig& cfg,
                                         const homogenize::LoadingPath& path) {
  path.validate();
  cfg.validate();
  const StiffnessMat<> c_el = mat.elastic_stiffness();
  const double scale = 1e-9 * c_el(0, 0);
  std::vector<VoxelStep> out;
  VoigtVec<> eps_n = VoigtVec<>::Zero();
  evaluator::InternalState a_n = mat.initial_state();
  for (int step = 1; step <= path.steps; ++step) {
    evaluator::EvalRequest req;
    req.eps_n = eps_n;
    req.a_n = a_n;
    req.dt = path.time_at(step) - path.time_at(step - 1);
    req.want_tangent = true;
    evaluator::EvalResult last;
    auto eval = [&](const VoigtVec<>& e) {
      req.eps_np1 = e;
      last = mat.evaluate(cfg, req);
      return Response{last.stress, *last.tangent};
    };
    const auto [eps, iterations] = solve_mixed(eval, elastic_guess(c_el, eps_n, path.strain_at_step(step)), scale);
    if (req.eps_np1 != eps) eval(eps);
    VoxelStep rec;
    rec.step = step;
    rec.time = path.time_at(step);
    rec.strain = eps;
    rec.stress = last.stress;
    rec.tangent = *last.tangent;
    rec.a = last.a;
    rec.substeps = last.substeps;
    rec.mixed_iterations = iterations;
    out.push_back(rec);
    eps_n = eps;
    a_n = last.a;
  }
  return out;
}

std::vector<SubstepRow> substep_sweep(const ExperimentConfig& cfg) {
  const auto mat = evaluator::make_michel_suquet("matrix", cfg.matrix);
  std::vector<SubstepRow> rows;
  for (odeint::Integrator which : cfg.integrators)
    for (double dt : cfg.sweep_dts) {
      SubstepRow row;
      row.integrator = odeint::to_string(which);
      row.dt = dt;
      try {
        const evaluator::StrategyConfig sc = cfg.strategy_config(which, cfg.error_measures.front());
        sc.validate();
        evaluator::EvalRequest req;
        req.a_n = mat->initial_state();
        req.eps_np1(0) = cfg.sweep_strain;
        req.dt = dt;
        const evaluator::EvalResult r = mat->evaluate(sc, req);
        row.substeps = r.substeps;
        row.rejected = r.rejected;
        row.newton_iterations = r.newton_iterations;
        row.sigma_xx = r.stress(0);
      } catch (const std::exception& e) {
        row.status = e.what();
        row.sigma_xx = std::numeric_limits<double>::quiet_NaN();
      }
      rows.push_back(row);
    }
  return rows;
}

void write_substep_csv(std::ostream& out, const std::vector<SubstepRow>& rows) {
  io::CsvWriter w(out, {"integrator", "dt", "substeps", "rejected", "newton_iterations", "sig_xx", "status"});
  for (const auto& r : rows) {
    std::string status = r.status;
    for (char& c : status)
      if (c == ',' || c == '\n') c = ';';
    w << r.integrator << r.dt << r.substeps << r.rejected << r.newton_iterations << r.sigma_xx << status;
    w.end_row();
  }
}

std::vector<TangentErrorRow> tangent_error_study(const ExperimentConfig& cfg) {
  const Law law(cfg.matrix);
  odeint::StepController ctl;
  ctl.atol = cfg.atol;
  ctl.rtol = cfg.rtol;
  odeint::StepController ref_ctl = ctl;
  ref_ctl.atol = cfg.reference_atol;
  ref_ctl.rtol = cfg.reference_rtol;
  ref_ctl.max_substeps = 1000000;
  const StiffnessMat<> c_el = law.elastic_stiffness();
  const double scale = 1e-9 * c_el(0, 0);

  std::vector<TangentErrorRow> rows;
  for (int steps : cfg.steps) {
    TangentErrorRow single{steps, "implicit_euler"}, adaptive{steps, "adaptive_implicit_euler"};
    try {
      homogenize::LoadingPath path = cfg.path;
      path.steps = steps;
      path.validate();
      VoigtVec<> eps_n = VoigtVec<>::Zero();
      SmallVec<double, 7> a_n = SmallVec<double, 7>::Zero();
      std::vector<double> d_ref, d_single, d_adaptive;
      std::vector<bool> flowing;
      for (int k = 1; k <= steps; ++k) {
        const double dt = path.time_at(k) - path.time_at(k - 1);
        LocalStep ref;
        auto eval = [&](const VoigtVec<>& e) {
          ref = local_step(law, Method::reference, ctl, ref_ctl, eps_n, a_n, e, dt);
          return Response{ref.stress, ref.tangent};
        };
        const VoigtVec<> eps =
            solve_mixed(eval, elastic_guess(c_el, eps_n, path.strain_at_step(k)), scale).first;
        ref = local_step(law, Method::reference, ctl, ref_ctl, eps_n, a_n, eps, dt);
        d_ref.push_back(flow_derivative(ref));
        d_single.push_back(flow_derivative(local_step(law, Method::single, ctl, ref_ctl, eps_n, a_n, eps, dt)));
        d_adaptive.push_back(
            flow_derivative(local_step(law, Method::adaptive, ctl, ref_ctl, eps_n, a_n, eps, dt)));
        flowing.push_back(ref.a(6) > a_n(6));
        eps_n = eps;
        a_n = ref.a;
      }
      double peak = 0.0;
      for (double d : d_ref) peak = std::max(peak, std::abs(d));
      std::vector<double> es, ea;
      for (std::size_t k = 0; k < d_ref.size(); ++k) {
        if (!flowing[k] || peak == 0.0 || !(std::abs(d_ref[k]) >= 1e-3 * peak)) continue;
        es.push_back(std::abs(d_single[k] - d_ref[k]) / std::abs(d_ref[k]));
        ea.push_back(std::abs(d_adaptive[k] - d_ref[k]) / std::abs(d_ref[k]));
      }
      for (auto [row, e] : {std::pair{&single, &es}, std::pair{&adaptive, &ea}}) {
        row->plastic_steps = static_cast<int>(e->size());
        row->median_rel_error = median(*e);
        for (double x : *e) {
          row->mean_rel_error += x / static_cast<double>(e->size());
          row->max_rel_error = std::max(row->max_rel_error, x);
        }
      }
    } catch (const std::exception& e) {
      single.status = adaptive.status = e.what();
      single.median_rel_error = adaptive.median_rel_error = std::numeric_limits<double>::quiet_NaN();
    }
    rows.push_back(single);
    rows.push_back(adaptive);
  }
  return rows;
}

void write_tangent_error_csv(std::ostream& out, const std::vector<TangentErrorRow>& rows) {
  io::CsvWriter w(out, {"steps", "method", "plastic_steps", "median_rel_error", "mean_rel_error", "max_rel_error", "status"});
  for (const auto& r : rows) {
    std::string status = r.status;
    for (char& c : status)
      if (c == ',' || c == '\n') c = ';';
    w << r.steps << r.method << r.plastic_steps << r.median_rel_error << r.mean_rel_error << r.max_rel_error << status;
    w.end_row();
  }
}

}  // namespace gsmlab::cli
