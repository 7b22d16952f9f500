#include "girder/perception.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace girder {

namespace {

constexpr int max_lines = 64;

double line_distance(const Vec2& p, double theta_rad, double rho) {
  return std::abs(-p.x() * std::sin(theta_rad) + p.y() * std::cos(theta_rad) - rho);
}

// least-squares refit over the claimed inliers
LineEstimate fit_line(const std::vector<Vec2>& pts) {
  Vec2 centroid = Vec2::Zero();
  for (const auto& p : pts) centroid += p;
  centroid /= static_cast<double>(pts.size());

  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (const auto& p : pts) {
    Vec2 d = p - centroid;
    sxx += d.x() * d.x();
    syy += d.y() * d.y();
    sxy += d.x() * d.y();
  }
  double alpha = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
  if (alpha < 0.0) alpha += kPi;
  if (alpha >= kPi) alpha -= kPi;

  LineEstimate line;
  line.theta = rad2deg(alpha);
  line.rho = -centroid.x() * std::sin(alpha) + centroid.y() * std::cos(alpha);
  line.inlier_count = static_cast<int>(pts.size());

  Vec2 dir{std::cos(alpha), std::sin(alpha)};
  double lo = 0.0, hi = 0.0;
  for (const auto& p : pts) {
    double t = (p - centroid).dot(dir);
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  line.extent = hi - lo;
  line.endpoints = {centroid + lo * dir, centroid + hi * dir};
  return line;
}

}  // namespace

std::vector<Vec2> filter_points(const Scan& s, double near, double far) {
  if (!(near < far)) throw Error("filter_points: need near < far");
  std::vector<Vec2> out;
  for (const auto& p : s.points) {
    if (p.range < near || p.range > far) continue;
    out.emplace_back(p.range * std::cos(p.bearing), p.range * std::sin(p.bearing));
  }
  return out;
}

std::vector<LineEstimate> hough_lines(const std::vector<Vec2>& points, const HoughParams& p) {
  if (points.empty()) throw Error("hough_lines: empty point set");
  if (p.theta_bins <= 0 || p.rho_bin_width <= 0.0 || p.inlier_distance <= 0.0 ||
      p.min_inliers <= 0 || p.nms_theta_window <= 0 || p.nms_rho_window <= 0)
    throw Error("hough params must all be positive");

  double reach = 0.0;
  for (const auto& pt : points) reach = std::max(reach, pt.norm());
  reach += p.rho_bin_width;
  const int rho_bins = 2 * static_cast<int>(std::ceil(reach / p.rho_bin_width)) + 1;
  const double rho_min = -0.5 * static_cast<double>(rho_bins) * p.rho_bin_width;
  const double theta_step = kPi / static_cast<double>(p.theta_bins);

  std::vector<int> acc(static_cast<std::size_t>(p.theta_bins) * rho_bins, 0);
  auto cell = [&](int ti, int ri) -> int& {
    return acc[static_cast<std::size_t>(ti) * rho_bins + ri];
  };
  for (const auto& pt : points) {
    for (int ti = 0; ti < p.theta_bins; ++ti) {
      double a = ti * theta_step;
      double rho = -pt.x() * std::sin(a) + pt.y() * std::cos(a);
      int ri = static_cast<int>(std::floor((rho - rho_min) / p.rho_bin_width));
      if (ri >= 0 && ri < rho_bins) ++cell(ti, ri);
    }
  }

  // peak cells in descending vote order, then non-max suppression
  struct peak {
    int votes, ti, ri;
  };
  std::vector<peak> peaks;
  for (int ti = 0; ti < p.theta_bins; ++ti)
    for (int ri = 0; ri < rho_bins; ++ri)
      if (cell(ti, ri) >= p.min_inliers) peaks.push_back({cell(ti, ri), ti, ri});
  std::sort(peaks.begin(), peaks.end(), [](const peak& a, const peak& b) {
    if (a.votes != b.votes) return a.votes > b.votes;
    if (a.ti != b.ti) return a.ti < b.ti;
    return a.ri < b.ri;
  });

  std::vector<char> suppressed(acc.size(), 0);
  std::vector<char> claimed(points.size(), 0);
  std::vector<LineEstimate> lines;

  for (const auto& pk : peaks) {
    if (static_cast<int>(lines.size()) >= max_lines) break;
    if (suppressed[static_cast<std::size_t>(pk.ti) * rho_bins + pk.ri]) continue;
    for (int dt = -p.nms_theta_window; dt <= p.nms_theta_window; ++dt) {
      int ti = (pk.ti + dt + p.theta_bins) % p.theta_bins;
      for (int dr = -p.nms_rho_window; dr <= p.nms_rho_window; ++dr) {
        int ri = pk.ri + dr;
        if (ri >= 0 && ri < rho_bins)
          suppressed[static_cast<std::size_t>(ti) * rho_bins + ri] = 1;
      }
    }

    double a = pk.ti * theta_step;
    double rho_center = rho_min + (pk.ri + 0.5) * p.rho_bin_width;
    std::vector<Vec2> inliers;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (claimed[i]) continue;
      if (line_distance(points[i], a, rho_center) <= p.inlier_distance) {
        inliers.push_back(points[i]);
        idx.push_back(i);
      }
    }
    if (static_cast<int>(inliers.size()) < p.min_inliers) continue;
    for (std::size_t i : idx) claimed[i] = 1;
    lines.push_back(fit_line(inliers));
  }

  std::sort(lines.begin(), lines.end(), [](const LineEstimate& a, const LineEstimate& b) {
    if (a.inlier_count != b.inlier_count) return a.inlier_count > b.inlier_count;
    if (std::abs(a.rho) != std::abs(b.rho)) return std::abs(a.rho) < std::abs(b.rho);
    return a.theta < b.theta;
  });
  return lines;
}

std::optional<LineEstimate> select_surface_line(const std::vector<LineEstimate>& lines,
                                                const CharacteristicWindow& w) {
  std::optional<LineEstimate> best;
  for (const auto& line : lines) {
    double d = std::fmod(std::abs(line.theta - w.slope_center), 180.0);
    d = std::min(d, 180.0 - d);
    if (d > w.slope_tolerance) continue;
    if (line.extent < w.extent_min || line.extent > w.extent_max) continue;
    auto rank = [](const LineEstimate& l) {
      return std::make_tuple(-l.inlier_count, std::abs(l.rho), l.theta, l.rho);
    };
    if (!best || rank(line) < rank(*best)) best = line;
  }
  return best;
}

SurfaceEstimate girder_offsets(const LineEstimate& line) {
  if (line.extent <= 0.0) throw Error("girder offsets: degenerate zero-extent line");
  SurfaceEstimate est;
  est.line = line;
  est.standoff = std::abs(line.rho);
  est.along_offset = std::max(line.endpoints[0].y(), line.endpoints[1].y());
  est.fresh = true;
  return est;
}

SurfaceEstimate column_offsets(const LineEstimate& line) {
  if (line.extent <= 0.0) throw Error("column offsets: degenerate zero-extent line");
  double a = deg2rad(line.theta);
  Vec2 normal{-std::sin(a), std::cos(a)};
  Vec2 dir{std::cos(a), std::sin(a)};
  if (dir.y() > 0.0 || (dir.y() == 0.0 && dir.x() < 0.0)) dir = -dir;

  Vec2 foot = line.rho * normal;  // projection of the origin onto the line
  Vec2 midpoint = 0.5 * (line.endpoints[0] + line.endpoints[1]);

  SurfaceEstimate est;
  est.line = line;
  est.standoff = std::abs(line.rho);
  est.along_offset = (foot - midpoint).dot(dir);
  est.fresh = true;
  return est;
}

int point_count_feature(const Scan& s, double sector_lo, double sector_hi) {
  int count = 0;
  for (const auto& p : s.points) {
    bool in = sector_lo <= sector_hi ? p.bearing >= sector_lo && p.bearing <= sector_hi
                                     : p.bearing >= sector_lo || p.bearing <= sector_hi;
    if (in) ++count;
  }
  return count;
}

}  // namespace girder
