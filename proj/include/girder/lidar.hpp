#pragma once

#include <cstdint>
#include <vector>

#include "girder/geometry.hpp"
#include "girder/types.hpp"

namespace girder {

struct LidarSpec {
  double max_range = 40.0;
  double angular_resolution = 2.0 * kPi / 360.0;
  double scan_rate = 2.0;  // Hz, hardware limit 10
  double range_noise_sigma = 0.01;
  double min_range = 0.3;
};

struct ScanPoint {
  double bearing = 0.0;  // radians [0, 2pi), 0 = heading
  double range = 0.0;    // meters
};

struct Scan {
  ScanPlane plane = ScanPlane::horizontal;
  Pose pose;
  std::vector<ScanPoint> points;  // bearings strictly increasing
  double timestamp = 0.0;
};

// casts one ray per angular step against the model (coordinates taken as
// meters), drops misses and dead-zone hits, adds gaussian range noise.
// horizontal plane: bearing counts toward body-left. vertical plane: contains
// heading and world up, bearing counts toward up.
Scan simulate_scan(const BridgeModel& m, const Pose& pose, ScanPlane plane,
                   const LidarSpec& spec, std::uint64_t rng_seed, double timestamp = 0.0);

// nearest-hit distance for one ray, no noise; negative when nothing is hit
double cast_ray(const BridgeModel& m, const Point3& origin, const Vec3& dir);

}  // namespace girder
