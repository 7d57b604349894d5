#include "gsmlab/evaluator/evaluator.hpp"

namespace gsmlab::evaluator {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::conventional: return "conventional";
    case Strategy::automatic: return "automatic";
    case Strategy::semi_automatic: return "semi-automatic";
  }
  return "?";
}

Strategy parse_strategy(std::string_view text) {
  for (Strategy s : {Strategy::conventional, Strategy::automatic, Strategy::semi_automatic})
    if (text == to_string(s)) return s;
  throw ConfigurationError("unknown strategy '" + std::string(text) +
                           "' (expected conventional, automatic or semi-automatic)");
}

std::string_view to_string(odeint::ErrorMeasure m) {
  return m == odeint::ErrorMeasure::internal ? "internal" : "stress";
}

odeint::ErrorMeasure parse_error_measure(std::string_view text) {
  if (text == "internal") return odeint::ErrorMeasure::internal;
  if (text == "stress") return odeint::ErrorMeasure::stress;
  throw ConfigurationError("unknown error measure '" + std::string(text) + "' (expected internal or stress)");
}

void StrategyConfig::validate() const {
  if (strategy == Strategy::automatic && integrator == odeint::Integrator::ode23s)
    throw ConfigurationError(
        "ode23s needs second derivatives of the evolution equation; use the semi-automatic strategy");
  if (strategy == Strategy::conventional && integrator != odeint::Integrator::implicit_euler)
    throw ConfigurationError("the conventional strategy is a single implicit Euler step");
  if (!(controller.atol > 0.0) || !(controller.rtol >= 0.0))
    throw ConfigurationError("tolerances must be positive");
  if (controller.max_substeps < 1) throw ConfigurationError("max_substeps must be at least 1");
  if (!(newton.tolerance > 0.0)) throw ConfigurationError("Newton tolerance must be positive");
}

std::shared_ptr<const Material> make_michel_suquet(std::string name, const gsm::MichelSuquetParams& params) {
  return std::make_shared<GsmMaterial<gsm::MichelSuquet<>>>(std::move(name), gsm::MichelSuquet<>(params));
}

std::shared_ptr<const Material> make_linear_elastic(std::string name, double young, double poisson) {
  return std::make_shared<GsmMaterial<gsm::LinearElastic>>(std::move(name), gsm::LinearElastic(young, poisson));
}

}  // namespace gsmlab::evaluator
