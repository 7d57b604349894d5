#pragma once

// Material-law evaluation at a quadrature point: integrate the internal
// variables over one loading step, then return the stress and (optionally)
// the consistent tangent d sigma_{n+1} / d eps_{n+1}.

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gsmlab/gsm/conventional.hpp"
#include "gsmlab/gsm/gsm.hpp"
#include "gsmlab/gsm/linear_elastic.hpp"
#include "gsmlab/gsm/michel_suquet.hpp"
#include "gsmlab/linalg/types.hpp"
#include "gsmlab/odeint/controller.hpp"
#include "gsmlab/odeint/embedded.hpp"
#include "gsmlab/odeint/implicit_euler.hpp"
#include "gsmlab/odeint/scheme.hpp"

namespace gsmlab::evaluator {

enum class Strategy {
  conventional,    // closed-form return mapping shipped with the law
  automatic,       // all partials of the potentials by AD
  semi_automatic,  // hand-coded first partials, higher derivatives by AD
};

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view text);
std::string_view to_string(odeint::ErrorMeasure m);
odeint::ErrorMeasure parse_error_measure(std::string_view text);

class ConfigurationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct StrategyConfig {
  Strategy strategy = Strategy::semi_automatic;
  odeint::Integrator integrator = odeint::Integrator::implicit_euler;
  odeint::ErrorMeasure error_measure = odeint::ErrorMeasure::internal;
  odeint::StepController controller{};
  odeint::NewtonOptions newton{};
  bool derivative_in_norm = true;

  // Throws ConfigurationError for unsupported combinations.
  void validate() const;
};

inline constexpr int kMaxInternal = 8;
using InternalState = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxInternal, 1>;

// Accepted substeps of an evaluation, for replaying it with frozen steps.
using StepRecord = std::vector<odeint::Substep>;

struct EvalRequest {
  VoigtVec<> eps_n = VoigtVec<>::Zero();
  InternalState a_n;
  VoigtVec<> eps_np1 = VoigtVec<>::Zero();
  double dt = 0.0;
  bool want_tangent = false;
  // Substeps of an earlier evaluation of the same step, tried first by the
  // adaptive schemes. Not owned.
  const StepRecord* warm_start = nullptr;
};

struct EvalResult {
  VoigtVec<> stress = VoigtVec<>::Zero();
  InternalState a;
  std::optional<StiffnessMat<>> tangent;
  int substeps = 0;
  int rejected = 0;
  int newton_iterations = 0;
};


class Material {
 public:
  virtual ~Material() = default;
  virtual std::string_view name() const = 0;
  virtual int internal_size() const = 0;
  virtual bool has_conventional() const = 0;
  virtual StiffnessMat<> elastic_stiffness() const = 0;
  virtual InternalState initial_state() const { return InternalState::Zero(internal_size()); }
  // Pure and thread-safe.
  virtual EvalResult evaluate(const StrategyConfig& cfg, const EvalRequest& req,
                              StepRecord* steps = nullptr) const = 0;
  // Stress of `req` with the substeps of an earlier evaluation replayed as
  // fixed constants. Differentiating this map reproduces the tangent.
  virtual VoigtVec<> replay_stress(const StrategyConfig& cfg, const EvalRequest& req,
                                   const StepRecord& steps) const = 0;
};

namespace detail {

template <class Law>
inline constexpr bool kConventional = false;
template <>
inline constexpr bool kConventional<gsm::MichelSuquet<>> = true;
template <>
inline constexpr bool kConventional<gsm::LinearElastic> = true;

template <class Law>
void fill_stress(const Law& law, gsm::Partials mode, const VoigtVec<>& eps, const gsm::State<Law, double>& a,
                 const SmallMat<double, Law::kInternal, 6>* da_deps, EvalResult& out) {
  if (da_deps) {
    auto [s, c] = gsm::stress_with_tangent(law, mode, eps, a, *da_deps);
    out.stress = s;
    out.tangent = c;
  } else {
    out.stress = gsm::stress(law, mode, eps, a);
  }
}

}  // namespace detail

template <gsm::GsmLaw Law>
class GsmMaterial final : public Material {
 public:
  static constexpr int m = Law::kInternal;
  static_assert(m <= kMaxInternal);

  GsmMaterial(std::string name, Law law) : name_(std::move(name)), law_(std::move(law)) {}

  const Law& law() const { return law_; }
  std::string_view name() const override { return name_; }
  int internal_size() const override { return m; }
  bool has_conventional() const override { return detail::kConventional<Law>; }
  StiffnessMat<> elastic_stiffness() const override { return law_.elastic_stiffness(); }

  EvalResult evaluate(const StrategyConfig& cfg, const EvalRequest& req, StepRecord* steps) const override {
    if (req.a_n.size() != m)
      throw std::invalid_argument("evaluate: internal state of size " + std::to_string(req.a_n.size()) +
                                  " for material '" + name_ + "' with " + std::to_string(m));
    if (!(req.dt >= 0.0)) throw std::invalid_argument("evaluate: negative time increment");
    if (steps) steps->clear();
    const gsm::State<Law, double> a_n = req.a_n;
    const gsm::Partials mode =
        cfg.strategy == Strategy::automatic ? gsm::Partials::automatic : gsm::Partials::hand;
    using Sens = SmallMat<double, m, 6>;
    EvalResult out;
    out.substeps = 1;

    if (cfg.strategy == Strategy::conventional) {
      if constexpr (std::is_same_v<Law, gsm::MichelSuquet<>>) {
        const auto r = gsm::conventional_evaluate(law_.params(), req.eps_n, a_n, req.eps_np1, req.dt,
                                                  req.want_tangent);
        out.stress = r.stress;
        out.a = r.state;
        out.tangent = r.tangent;
        out.newton_iterations = r.iterations;
        if (steps && req.dt > 0.0) steps->push_back({0.0, req.dt});
        return out;
      } else if constexpr (m == 0) {
      } else {
        throw ConfigurationError("material '" + name_ + "' has no conventional update");
      }
    }

    if (m == 0 || req.dt == 0.0) {
      const Sens zero = Sens::Zero();
      out.a = a_n;
      detail::fill_stress(law_, mode, req.eps_np1, a_n, req.want_tangent ? &zero : nullptr, out);
      return out;
    }

    if constexpr (m > 0) {
      const odeint::GsmSystem<Law> sys(law_, mode, req.eps_n, req.eps_np1, req.dt);
      gsm::State<Law, double> a;
      std::optional<Sens> da;
      odeint::IntegrationStats stats;
      if (cfg.integrator == odeint::Integrator::implicit_euler) {
        auto r = odeint::implicit_euler_step(sys, a_n, req.want_tangent, cfg.newton);
        a = r.y;
        da = r.dy_dp;
        stats = r.stats;
        if (steps) *steps = std::move(r.steps);
      } else {
        odeint::AdaptiveOptions o;
        o.controller = cfg.controller;
        o.measure = cfg.error_measure;
        o.coupled = req.want_tangent;
        o.derivative_in_norm = cfg.derivative_in_norm;
        o.warm_start = req.warm_start;
        auto r = odeint::adaptive_integrate(odeint::scheme(cfg.integrator), sys, a_n, o);
        a = r.y;
        da = r.dy_dp;
        stats = r.stats;
        if (steps) *steps = std::move(r.steps);
      }
      out.a = a;
      out.substeps = stats.substeps;
      out.rejected = stats.rejected;
      out.newton_iterations = stats.newton_iterations;
      detail::fill_stress(law_, mode, req.eps_np1, a, da ? &*da : nullptr, out);
    }
    return out;
  }

  VoigtVec<> replay_stress(const StrategyConfig& cfg, const EvalRequest& req,
                           const StepRecord& steps) const override {
    if (m == 0 || cfg.strategy == Strategy::conventional || cfg.integrator == odeint::Integrator::implicit_euler ||
        steps.empty()) {
      EvalRequest primal = req;
      primal.want_tangent = false;
      return evaluate(cfg, primal, nullptr).stress;
    }
    const gsm::Partials mode =
        cfg.strategy == Strategy::automatic ? gsm::Partials::automatic : gsm::Partials::hand;
    if constexpr (m > 0) {
      const odeint::GsmSystem<Law> sys(law_, mode, req.eps_n, req.eps_np1, req.dt);
      const gsm::State<Law, double> a =
          odeint::frozen_step_primal(odeint::scheme(cfg.integrator), sys, gsm::State<Law, double>(req.a_n), steps);
      return gsm::stress(law_, mode, req.eps_np1, a);
    }
    return VoigtVec<>::Zero();
  }

 private:
  std::string name_;
  Law law_;
};

std::shared_ptr<const Material> make_michel_suquet(std::string name, const gsm::MichelSuquetParams& params);
std::shared_ptr<const Material> make_linear_elastic(std::string name, double young, double poisson);

}  // namespace gsmlab::evaluator
