#include "lipsyn/simulation/trajectory_csv.h"

#include <fstream>
#include <stdexcept>

#include "lipsyn/numeric_format.h"

namespace lipsyn::simulation {

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
  const Eigen::Index n = traj.states.cols(), m = traj.inputs.cols(), p = traj.outputs.cols();
  out << "k";
  for (Eigen::Index i = 1; i <= n; ++i) out << ",x" << i;
  for (Eigen::Index i = 1; i <= m; ++i) out << ",u" << i;
  for (Eigen::Index i = 1; i <= p; ++i) out << ",y" << i;
  out << '\n';
  for (Eigen::Index k = 0; k < traj.states.rows(); ++k) {
    out << k;
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << format_significant(traj.states(k, i));
    for (Eigen::Index i = 0; i < m; ++i) {
      out << ',';
      if (k < traj.inputs.rows()) out << format_significant(traj.inputs(k, i));
    }
    for (Eigen::Index i = 0; i < p; ++i) out << ',' << format_significant(traj.outputs(k, i));
    out << '\n';
  }
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_trajectory_csv(traj, out);
  if (!out) throw std::runtime_error("error while writing '" + path + "'");
}

}  // namespace lipsyn::simulation
