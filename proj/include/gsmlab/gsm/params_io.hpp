#pragma once

#include <filesystem>

#include "gsmlab/gsm/michel_suquet.hpp"
#include "gsmlab/io/keyvalue.hpp"

namespace gsmlab::gsm {

// Keys: E, nu, sigma_Y, H, eps0_dot, sigma_d, n (SI units). Missing keys keep
// their defaults; unknown keys are rejected.
MichelSuquetParams params_from_keyvalue(const io::KeyValueFile& kv);
MichelSuquetParams load_params(const std::filesystem::path& path);

}  // namespace gsmlab::gsm
