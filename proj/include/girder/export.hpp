#pragma once

#include <string>

#include "girder/sim.hpp"

namespace girder {

// header: t,x,y,z,yaw,routine,standoff_err,along_err,vx,vy,vz
// numbers as %.17g, stale errors as "nan"
std::string csv_text(const TrajectoryLog& log);

std::string metrics_json_text(const TrajectoryLog& log);

// side view (world x against z) with the bridge outlines, the flown path,
// switch markers, and start/end dots
std::string svg_text(const TrajectoryLog& log);

// writes trajectory.csv, metrics.json and trajectory.svg under out_dir
void export_log(const TrajectoryLog& log, const std::string& out_dir);

}  // namespace girder
