#include "gsmlab/cli/config.hpp"

#include <set>
#include <sstream>

#include "gsmlab/gsm/params_io.hpp"
#include "gsmlab/io/csv.hpp"

namespace gsmlab::cli {

namespace {

bool parse_bool(const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw io::ConfigError("expected a boolean, got '" + text + "'");
}

template <class T, class F>
std::string join(const std::vector<T>& v, F&& f) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::string(f(v[i]));
  return s;
}

}  // namespace

std::vector<odeint::Integrator> parse_integrators(const std::string& list) {
  std::vector<odeint::Integrator> out;
  for (const auto& s : io::split_list(list)) out.push_back(odeint::parse_integrator(s));
  if (out.empty()) throw io::ConfigError("empty integrator list");
  return out;
}

std::vector<odeint::ErrorMeasure> parse_error_measures(const std::string& list) {
  std::vector<odeint::ErrorMeasure> out;
  for (const auto& s : io::split_list(list)) out.push_back(evaluator::parse_error_measure(s));
  if (out.empty()) throw io::ConfigError("empty error-measure list");
  return out;
}

std::vector<int> parse_steps(const std::string& list) {
  std::vector<int> out;
  for (const auto& s : io::split_list(list)) {
    const long long v = io::parse_int(s);
    if (v < 1 || v > 1000000) throw io::ConfigError("step count out of range: " + s);
    out.push_back(static_cast<int>(v));
  }
  if (out.empty()) throw io::ConfigError("empty step list");
  return out;
}

homogenize::GridDims parse_grid(const std::string& text) {
  const auto parts = io::split_list(text);
  if (parts.size() != 3) throw io::ConfigError("grid needs three comma-separated sizes, got '" + text + "'");
  homogenize::GridDims d{static_cast<int>(io::parse_int(parts[0])), static_cast<int>(io::parse_int(parts[1])),
                         static_cast<int>(io::parse_int(parts[2]))};
  d.validate();
  return d;
}

const std::vector<std::string>& ExperimentConfig::keys() {
  static const std::vector<std::string> k{
      "experiment",     "material",       "fiber_young",   "fiber_poisson",  "strategy",      "integrators",
      "error_measures", "steps",          "atol",          "rtol",           "grid",          "fiber_fraction",
      "geometry",       "fft_tolerance",  "bc_tolerance",  "max_iterations", "update_reference",
      "record_tangent", "strain_rate",    "strain_upper",  "strain_lower",   "sweep_strain",  "sweep_dts",
      "reference_atol", "reference_rtol", "out",           "threads",        "chunk_size",
      "seed"};
  return k;
}

void ExperimentConfig::apply(const io::KeyValueFile& kv) {
  kv.require_known(std::set<std::string>(keys().begin(), keys().end()));
  auto str = [&](const char* k, auto&& set) {
    if (kv.has(k)) set(kv.get(k));
  };
  auto num = [&](const char* k, double& v) {
    if (kv.has(k)) v = kv.get_double(k);
  };
  str("experiment", [&](const std::string& v) { experiment = v; });
  str("material", [&](const std::string& v) {
    material = v;
    matrix = gsm::load_params(material);
  });
  num("fiber_young", fiber_young);
  num("fiber_poisson", fiber_poisson);
  str("strategy", [&](const std::string& v) { strategy = evaluator::parse_strategy(v); });
  str("integrators", [&](const std::string& v) { integrators = parse_integrators(v); });
  str("error_measures", [&](const std::string& v) { error_measures = parse_error_measures(v); });
  str("steps", [&](const std::string& v) { steps = parse_steps(v); });
  num("atol", atol);
  num("rtol", rtol);
  str("grid", [&](const std::string& v) { grid = parse_grid(v); });
  num("fiber_fraction", fiber_fraction);
  str("geometry", [&](const std::string& v) { geometry = v; });
  num("fft_tolerance", fft_tolerance);
  num("bc_tolerance", bc_tolerance);
  if (kv.has("max_iterations")) max_iterations = static_cast<int>(kv.get_int("max_iterations"));
  str("update_reference", [&](const std::string& v) { update_reference = parse_bool(v); });
  str("record_tangent", [&](const std::string& v) { record_tangent = parse_bool(v); });
  num("strain_rate", path.rate);
  num("strain_upper", path.upper);
  num("strain_lower", path.lower);
  num("sweep_strain", sweep_strain);
  str("sweep_dts", [&](const std::string& v) {
    sweep_dts.clear();
    for (const auto& s : io::split_list(v)) sweep_dts.push_back(io::parse_double(s));
  });
  num("reference_atol", reference_atol);
  num("reference_rtol", reference_rtol);
  str("out", [&](const std::string& v) { out = v; });
  if (kv.has("threads")) threads = static_cast<int>(kv.get_int("threads"));
  if (kv.has("chunk_size")) {
    const long long c = kv.get_int("chunk_size");
    if (c < 1) throw io::ConfigError("chunk_size must be at least 1");
    chunk_size = static_cast<std::size_t>(c);
  }
  if (kv.has("seed")) {
    const long long s = kv.get_int("seed");
    if (s < 0) throw io::ConfigError("seed must be non-negative");
    seed = static_cast<std::uint64_t>(s);
  }
}

void ExperimentConfig::validate() const {
  matrix.validate();
  if (!(fiber_young > 0.0) || !(fiber_poisson > -1.0 && fiber_poisson < 0.5))
    throw io::ConfigError("invalid fiber elastic constants");
  if (integrators.empty() || error_measures.empty() || steps.empty()) throw io::ConfigError("empty run matrix");
  grid.validate();
  if (!(fiber_fraction > 0.0 && fiber_fraction < 0.5)) throw io::ConfigError("fiber_fraction must be in (0, 0.5)");
  if (!(fft_tolerance > 0.0) || !(bc_tolerance > 0.0) || max_iterations < 1)
    throw io::ConfigError("invalid solver tolerances");
  if (threads < 1) throw io::ConfigError("threads must be at least 1");
  if (chunk_size < 1) throw io::ConfigError("chunk_size must be at least 1");
  for (double dt : sweep_dts)
    if (!(dt > 0.0)) throw io::ConfigError("sweep_dts must be positive");
  if (!(reference_atol > 0.0) || !(reference_rtol > 0.0)) throw io::ConfigError("invalid reference tolerances");
  homogenize::LoadingPath p = path;
  for (int n : steps) {
    p.steps = n;
    p.validate();
  }
  for (auto i : integrators)
    for (auto m : error_measures) strategy_config(i, m).validate();
}

evaluator::StrategyConfig ExperimentConfig::strategy_config(odeint::Integrator which,
                                                            odeint::ErrorMeasure measure) const {
  evaluator::StrategyConfig c;
  c.strategy = strategy;
  c.integrator = which;
  c.error_measure = measure;
  c.controller.atol = atol;
  c.controller.rtol = rtol;
  return c;
}

std::string ExperimentConfig::to_text() const {
  std::ostringstream s;
  auto d = [](double v) { return io::format_double(v); };
  s << "experiment = \"" << experiment << "\"\n";
  if (!material.empty()) s << "material = \"" << material.string() << "\"\n";
  s << "fiber_young = " << d(fiber_young) << "\nfiber_poisson = " << d(fiber_poisson) << '\n'
    << "strategy = " << evaluator::to_string(strategy) << '\n'
    << "integrators = \"" << join(integrators, [](auto i) { return odeint::to_string(i); }) << "\"\n"
    << "error_measures = \"" << join(error_measures, [](auto m) { return evaluator::to_string(m); }) << "\"\n"
    << "steps = \"" << join(steps, [](int v) { return std::to_string(v); }) << "\"\n"
    << "atol = " << d(atol) << "\nrtol = " << d(rtol) << '\n'
    << "grid = \"" << grid.nx << ',' << grid.ny << ',' << grid.nz << "\"\n"
    << "fiber_fraction = " << d(fiber_fraction) << '\n';
  if (!geometry.empty()) s << "geometry = \"" << geometry.string() << "\"\n";
  s << "fft_tolerance = " << d(fft_tolerance) << "\nbc_tolerance = " << d(bc_tolerance) << '\n'
    << "max_iterations = " << max_iterations << '\n'
    << "update_reference = " << (update_reference ? "true" : "false") << '\n'
    << "record_tangent = " << (record_tangent ? "true" : "false") << '\n'
    << "strain_rate = " << d(path.rate) << "\nstrain_upper = " << d(path.upper) << "\nstrain_lower = "
    << d(path.lower) << '\n'
    << "sweep_strain = " << d(sweep_strain) << '\n'
    << "sweep_dts = \"" << join(sweep_dts, [&](double v) { return d(v); }) << "\"\n"
    << "reference_atol = " << d(reference_atol) << "\nreference_rtol = " << d(reference_rtol) << '\n'
    << "out = \"" << out.string() << "\"\nthreads = " << threads << "\nchunk_size = " << chunk_size
    << "\nseed = " << seed << '\n';
  return s.str();
}

}  // namespace gsmlab::cli
