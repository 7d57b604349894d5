#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace gsmlab::cli {

struct SelftestResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Quick invariant suites on random states: AD partials, spectrum of the
// evolution Jacobian, strategy equivalence, coupled vs frozen tangents,
// Green operator and homogeneous solves, batch determinism.
std::vector<SelftestResult> run_selftest(std::uint64_t seed, int threads);
void print_selftest(std::ostream& out, const std::vector<SelftestResult>& results);

}  // namespace gsmlab::cli
