#include "girder/lidar.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace girder {

namespace {

constexpr double hit_epsilon = 1e-9;

// portable gaussian draws; std::normal_distribution sequences differ across
// standard libraries
struct gaussian_source {
  std::mt19937_64 rng;
  double spare = 0.0;
  bool has_spare = false;

  explicit gaussian_source(std::uint64_t seed) : rng(seed) {}

  double uniform_01() {  // (0, 1]
    return (static_cast<double>(rng() >> 11) + 1.0) * (1.0 / 9007199254740992.0);
  }

  double operator()() {
    if (has_spare) {
      has_spare = false;
      return spare;
    }
    double u1 = uniform_01();
    double u2 = uniform_01();
    double radius = std::sqrt(-2.0 * std::log(u1));
    spare = radius * std::sin(2.0 * kPi * u2);
    has_spare = true;
    return radius * std::cos(2.0 * kPi * u2);
  }
};

// parallelogram membership via the gram system of the two edge vectors
bool inside_face(const SurfacePolygon& s, const Point3& p) {
  Vec3 e1 = s.vertices[1] - s.vertices[0];
  Vec3 e2 = s.vertices[3] - s.vertices[0];
  Vec3 d = p - s.vertices[0];
  double g11 = e1.dot(e1), g12 = e1.dot(e2), g22 = e2.dot(e2);
  double det = g11 * g22 - g12 * g12;
  if (std::abs(det) < 1e-18) return false;
  double r1 = d.dot(e1), r2 = d.dot(e2);
  double a = (g22 * r1 - g12 * r2) / det;
  double b = (g11 * r2 - g12 * r1) / det;
  return a >= -1e-9 && a <= 1.0 + 1e-9 && b >= -1e-9 && b <= 1.0 + 1e-9;
}

}  // namespace

double cast_ray(const BridgeModel& m, const Point3& origin, const Vec3& dir) {
  double nearest = -1.0;
  for (const auto& s : m.surfaces) {
    double denom = dir.dot(s.plane_normal);
    if (std::abs(denom) < 1e-12) continue;
    double t = (s.vertices[0] - origin).dot(s.plane_normal) / denom;
    if (t < hit_epsilon) continue;
    if (nearest >= 0.0 && t >= nearest) continue;
    if (inside_face(s, origin + t * dir)) nearest = t;
  }
  return nearest;
}

Scan simulate_scan(const BridgeModel& m, const Pose& pose, ScanPlane plane,
                   const LidarSpec& spec, std::uint64_t rng_seed, double timestamp) {
  if (!(spec.min_range > 0.0 && spec.min_range < spec.max_range))
    throw Error("lidar spec: need 0 < min_range < max_range");
  if (!(spec.scan_rate > 0.0 && spec.scan_rate <= 10.0))
    throw Error("lidar spec: scan_rate must be in (0, 10]");
  if (spec.range_noise_sigma < 0.0) throw Error("lidar spec: sigma must be >= 0");
  if (!pose.position.allFinite() || !std::isfinite(pose.yaw))
    throw Error("scan pose must be finite");

  Vec3 heading{std::cos(pose.yaw), std::sin(pose.yaw), 0.0};
  Vec3 lateral = plane == ScanPlane::horizontal
                     ? Vec3{-std::sin(pose.yaw), std::cos(pose.yaw), 0.0}  // body left
                     : Vec3{0.0, 0.0, 1.0};                                // world up

  Scan scan;
  scan.plane = plane;
  scan.pose = pose;
  scan.timestamp = timestamp;

  gaussian_source noise(rng_seed);
  for (double bearing = 0.0; bearing < 2.0 * kPi - 1e-12; bearing += spec.angular_resolution) {
    Vec3 dir = std::cos(bearing) * heading + std::sin(bearing) * lateral;
    double t = cast_ray(m, pose.position, dir);
    if (t < spec.min_range || t > spec.max_range) continue;
    double r = t + spec.range_noise_sigma * noise();
    r = std::clamp(r, spec.min_range, spec.max_range);
    scan.points.push_back({bearing, r});
  }
  return scan;
}

}  // namespace girder
