#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace girder {

using Point3 = Eigen::Vector3d;
using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;

constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

// base for everything thrown out of this library
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

enum class SurfaceKind { girder, column, top, bottom };

enum class RoutineKind {
  girder_right,
  girder_left,
  column_up,
  column_down,
  bottom_right,
  bottom_left,
  top_right,
  top_left,
};

enum class ScanPlane { horizontal, vertical };

inline std::string to_string(SurfaceKind k) {
  switch (k) {
    case SurfaceKind::girder: return "girder";
    case SurfaceKind::column: return "column";
    case SurfaceKind::top: return "top";
    default: return "bottom";
  }
}

inline std::string to_string(RoutineKind k) {
  switch (k) {
    case RoutineKind::girder_right: return "GR";
    case RoutineKind::girder_left: return "GL";
    case RoutineKind::column_up: return "CU";
    case RoutineKind::column_down: return "CD";
    case RoutineKind::bottom_right: return "BR";
    case RoutineKind::bottom_left: return "BL";
    case RoutineKind::top_right: return "TR";
    default: return "TL";
  }
}

inline std::string to_string(ScanPlane p) {
  return p == ScanPlane::horizontal ? "horizontal" : "vertical";
}

inline SurfaceKind surface_kind_from_string(const std::string& s) {
  if (s == "girder") return SurfaceKind::girder;
  if (s == "column") return SurfaceKind::column;
  if (s == "top") return SurfaceKind::top;
  if (s == "bottom") return SurfaceKind::bottom;
  throw Error("unknown surface kind: " + s);
}

inline RoutineKind routine_kind_from_string(const std::string& s) {
  if (s == "GR") return RoutineKind::girder_right;
  if (s == "GL") return RoutineKind::girder_left;
  if (s == "CU") return RoutineKind::column_up;
  if (s == "CD") return RoutineKind::column_down;
  if (s == "BR") return RoutineKind::bottom_right;
  if (s == "BL") return RoutineKind::bottom_left;
  if (s == "TR") return RoutineKind::top_right;
  if (s == "TL") return RoutineKind::top_left;
  throw Error("unknown routine kind: " + s);
}

struct Pose {
  Point3 position{0.0, 0.0, 0.0};
  double yaw = 0.0;  // radians, about world z, 0 = +x
};

}  // namespace girder
