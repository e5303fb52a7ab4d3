#pragma once

#include <ostream>
#include <string>

#include "lipsyn/simulation/simulate.h"

namespace lipsyn::simulation {

/// Header k,x1..xn,u1..um,y1..yp, one row per sample, 12 significant
/// digits. The input columns of the last row are empty.
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);

/// Throws std::runtime_error when the file cannot be written.
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

}  // namespace lipsyn::simulation
