// Trajectory CSV: header `stroke,step,px,py,pz,ox,oy,oz`, UTF-8, `.` decimal
// point. Steps are strictly increasing within a stroke; orientations are
// re-normalized on read when within 1e-3 of unit length, otherwise rejected.
#pragma once

#include <string>

#include "covdiff/traj/trajectory.hpp"

namespace covdiff::traj {

TrajectorySet read_traj_csv(const std::string& text);
std::string write_traj_csv(const TrajectorySet& t);

TrajectorySet read_traj_csv_file(const std::string& path);
void write_traj_csv_file(const TrajectorySet& t, const std::string& path);

}  // namespace covdiff::traj
