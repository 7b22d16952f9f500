#pragma once

#include <array>
#include <optional>
#include <vector>

#include "girder/lidar.hpp"
#include "girder/types.hpp"

namespace girder {

struct HoughParams {
  int theta_bins = 180;
  double rho_bin_width = 0.05;   // meters
  double inlier_distance = 0.10;  // meters
  int min_inliers = 8;
  int nms_theta_window = 5;  // bins
  int nms_rho_window = 5;    // bins
};

struct LineEstimate {
  double theta = 0.0;  // inclination, degrees [0,180); 0 = horizontal
  double rho = 0.0;    // signed normal offset of the line from the origin
  double extent = 0.0;
  int inlier_count = 0;
  std::array<Vec2, 2> endpoints{};  // extreme inlier projections, on the line
};

struct CharacteristicWindow {
  double slope_center = 90.0;    // degrees
  double slope_tolerance = 15.0;  // degrees
  double extent_min = 3.0;
  double extent_max = 5.0;
};

struct SurfaceEstimate {
  double standoff = 0.0;
  double along_offset = 0.0;
  LineEstimate line;
  bool fresh = false;
};

// range-gated cartesian conversion: x = r cos(bearing), y = r sin(bearing)
std::vector<Vec2> filter_points(const Scan& s, double near, double far);

std::vector<LineEstimate> hough_lines(const std::vector<Vec2>& points, const HoughParams& p);

std::optional<LineEstimate> select_surface_line(const std::vector<LineEstimate>& lines,
                                                const CharacteristicWindow& w);

// vertical-scan girder face line: standoff plus depth below the visible top
SurfaceEstimate girder_offsets(const LineEstimate& line);

// horizontal-scan column face line: standoff plus signed offset from the face
// center, positive when the sensor sits right of center
SurfaceEstimate column_offsets(const LineEstimate& line);

// raw point count inside a bearing sector; lo > hi wraps through 2pi
int point_count_feature(const Scan& s, double sector_lo, double sector_hi);

}  // namespace girder
