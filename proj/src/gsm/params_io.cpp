#include "gsmlab/gsm/params_io.hpp"

namespace gsmlab::gsm {

MichelSuquetParams params_from_keyvalue(const io::KeyValueFile& kv) {
  kv.require_known({"E", "nu", "sigma_Y", "H", "eps0_dot", "sigma_d", "n"});
  MichelSuquetParams p;
  auto read = [&](const char* key, double& field) {
    if (kv.has(key)) field = kv.get_double(key);
  };
  read("E", p.young);
  read("nu", p.poisson);
  read("sigma_Y", p.yield_stress);
  read("H", p.hardening);
  read("eps0_dot", p.ref_strain_rate);
  read("sigma_d", p.drag_stress);
  read("n", p.rate_exponent);
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw io::ConfigError(e.what());
  }
  return p;
}

MichelSuquetParams load_params(const std::filesystem::path& path) {
  return params_from_keyvalue(io::KeyValueFile::load(path));
}

}  // namespace gsmlab::gsm
