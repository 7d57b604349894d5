#include "gsmlab/homogenize/output.hpp"

#include "gsmlab/io/csv.hpp"

namespace gsmlab::homogenize {

void write_path_csv(std::ostream& out, const std::vector<PathStep>& steps) {
  io::CsvWriter csv(out, {"step", "time", "eps_xx", "sig_xx", "sig_yy", "sig_zz", "sig_yz", "sig_xz", "sig_xy", "C11",
                          "C12", "iterations", "mean_substeps"});
  for (const PathStep& s : steps) {
    csv << s.step << s.time << s.eps_xx;
    for (int r = 0; r < 6; ++r) csv << s.stress(r);
    csv << s.c11 << s.c12 << s.iterations << s.mean_substeps;
    csv.end_row();
  }
}

}  // namespace gsmlab::homogenize
