#pragma once

// Closed-form backward-Euler update for the Michel-Suquet law: the implicit
// step collapses onto a scalar equation for the equivalent plastic increment,
// solved by a bracketed Newton iteration. Hand-derived consistent tangent.

#include <optional>
#include <stdexcept>

#include "gsmlab/gsm/michel_suquet.hpp"
#include "gsmlab/linalg/types.hpp"

namespace gsmlab::gsm {

class ReturnMappingError : public std::runtime_error {
 public:
  ReturnMappingError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

struct ConventionalResult {
  VoigtVec<> stress;
  SmallVec<double, 7> state;
  std::optional<StiffnessMat<>> tangent;
  std::optional<SmallMat<double, 7, 6>> da_deps;
  int iterations = 0;
};

// One backward-Euler step from (eps_n, a_n) to eps_np1 over time h >= 0.
// The update itself only reads eps_np1.
ConventionalResult conventional_evaluate(const MichelSuquetParams& params, const VoigtVec<>& eps_n,
                                         const SmallVec<double, 7>& a_n, const VoigtVec<>& eps_np1, double h,
                                         bool want_tangent);

}  // namespace gsmlab::gsm
