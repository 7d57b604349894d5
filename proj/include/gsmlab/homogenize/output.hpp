#pragma once

#include <ostream>
#include <vector>

#include "gsmlab/homogenize/loading.hpp"

namespace gsmlab::homogenize {

// step,time,eps_xx,sig_xx,sig_yy,sig_zz,sig_yz,sig_xz,sig_xy,C11,C12,iterations,mean_substeps
void write_path_csv(std::ostream& out, const std::vector<PathStep>& steps);

}  // namespace gsmlab::homogenize
