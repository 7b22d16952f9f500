#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "girder/types.hpp"

namespace girder {

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& msg) : Error(msg) {}
};

// planar rectangular face of the bridge, with its two coverage nodes
struct SurfacePolygon {
  std::string id;  // single letter
  SurfaceKind kind = SurfaceKind::girder;
  std::array<Point3, 4> vertices{};
  Point3 node_a{0.0, 0.0, 0.0};
  Point3 node_b{0.0, 0.0, 0.0};
  Vec3 plane_normal{0.0, 0.0, 1.0};  // unit, derived from vertices
};

struct BridgeModel {
  std::vector<SurfacePolygon> surfaces;
  // unordered id pairs, stored normalized (first < second), sorted
  std::vector<std::pair<std::string, std::string>> adjacency;
  double distance_scale = 1.0;  // meters per config unit

  const SurfacePolygon* find_surface(const std::string& id) const;
  const SurfacePolygon& surface(const std::string& id) const;
  bool adjacent(const std::string& a, const std::string& b) const;
};

bool operator==(const SurfacePolygon& a, const SurfacePolygon& b);
bool operator==(const BridgeModel& a, const BridgeModel& b);

BridgeModel load_bridge(const std::string& config_text);
BridgeModel load_bridge_file(const std::string& path);
std::string serialize_bridge(const BridgeModel& m);

// euclidean distance between node positions, in meters
double node_distance(const BridgeModel& m, const Point3& p, const Point3& q);

// traversal direction fixes the routine: columns by z, the rest by x
RoutineKind routine_for_leg(const SurfacePolygon& s, const Point3& entry, const Point3& exit);

// copy of the model with all coordinates multiplied out to meters
BridgeModel scaled_to_meters(const BridgeModel& m);

}  // namespace girder
