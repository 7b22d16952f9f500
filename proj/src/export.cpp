#include "girder/export.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace girder {

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("write failed for " + path);
}

}  // namespace

std::string csv_text(const TrajectoryLog& log) {
  std::ostringstream out;
  out << "t,x,y,z,yaw,routine,standoff_err,along_err,vx,vy,vz\n";
  for (const auto& s : log.samples) {
    out << num(s.t) << ',' << num(s.state.position.x()) << ',' << num(s.state.position.y()) << ','
        << num(s.state.position.z()) << ',' << num(s.state.yaw) << ',' << to_string(s.routine)
        << ',' << num(s.standoff_err) << ',' << num(s.along_err) << ','
        << num(s.state.velocity.x()) << ',' << num(s.state.velocity.y()) << ','
        << num(s.state.velocity.z()) << '\n';
  }
  return out.str();
}

std::string metrics_json_text(const TrajectoryLog& log) {
  nlohmann::ordered_json j;
  j["completed"] = log.metrics.completed;
  j["mission_time"] = log.metrics.mission_time;
  j["timeout_diagnostic"] = log.metrics.timeout_diagnostic;

  nlohmann::ordered_json events = nlohmann::ordered_json::array();
  for (const auto& e : log.events) {
    nlohmann::ordered_json je;
    je["from_leg"] = e.from_leg;
    je["to_leg"] = e.to_leg;
    je["trigger"] = e.trigger;
    je["t"] = e.timestamp;
    je["position"] = {e.pose.position.x(), e.pose.position.y(), e.pose.position.z()};
    je["yaw"] = e.pose.yaw;
    events.push_back(je);
  }
  j["events"] = events;

  nlohmann::ordered_json legs = nlohmann::ordered_json::array();
  for (const auto& l : log.metrics.legs) {
    nlohmann::ordered_json jl;
    jl["leg"] = l.leg_index;
    jl["surface"] = l.surface_id;
    jl["routine"] = to_string(l.routine);
    jl["start_time"] = l.start_time;
    jl["end_time"] = l.end_time;
    jl["max_standoff_err"] = l.max_standoff_err;
    jl["rms_standoff_err"] = l.rms_standoff_err;
    jl["max_along_err"] = l.max_along_err;
    jl["rms_along_err"] = l.rms_along_err;
    legs.push_back(jl);
  }
  j["legs"] = legs;
  return j.dump(2) + "\n";
}

std::string svg_text(const TrajectoryLog& log) {
  double min_x = 0.0, max_x = 1.0, min_z = 0.0, max_z = 1.0;
  bool seeded = false;
  auto grow = [&](double x, double z) {
    if (!seeded) {
      min_x = max_x = x;
      min_z = max_z = z;
      seeded = true;
      return;
    }
    min_x = std::min(min_x, x);
    max_x = std::max(max_x, x);
    min_z = std::min(min_z, z);
    max_z = std::max(max_z, z);
  };
  for (const auto& outline : log.surface_outlines)
    for (const auto& v : outline) grow(v.x(), v.z());
  for (const auto& s : log.samples) grow(s.state.position.x(), s.state.position.z());

  const double margin = 40.0;
  const double span_x = std::max(max_x - min_x, 1e-6);
  const double span_z = std::max(max_z - min_z, 1e-6);
  const double k = 800.0 / span_x;
  const double width = 800.0 + 2.0 * margin;
  const double height = span_z * k + 2.0 * margin;
  auto sx = [&](double x) { return margin + (x - min_x) * k; };
  auto sy = [&](double z) { return margin + (max_z - z) * k; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(width) << "\" height=\""
      << px(height) << "\" viewBox=\"0 0 " << px(width) << ' ' << px(height) << "\">\n";
  out << "  <rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";

  for (const auto& outline : log.surface_outlines) {
    out << "  <polygon points=\"";
    for (std::size_t i = 0; i < outline.size(); ++i) {
      if (i > 0) out << ' ';
      out << px(sx(outline[i].x())) << ',' << px(sy(outline[i].z()));
    }
    out << "\" fill=\"none\" stroke=\"#e67e22\" stroke-width=\"1.5\"/>\n";
  }

  if (!log.samples.empty()) {
    const std::size_t stride = std::max<std::size_t>(1, log.samples.size() / 4000);
    out << "  <polyline points=\"";
    bool first = true;
    for (std::size_t i = 0; i < log.samples.size(); i += stride) {
      const auto& p = log.samples[i].state.position;
      if (!first) out << ' ';
      out << px(sx(p.x())) << ',' << px(sy(p.z()));
      first = false;
    }
    const auto& last = log.samples.back().state.position;
    if ((log.samples.size() - 1) % stride != 0)
      out << ' ' << px(sx(last.x())) << ',' << px(sy(last.z()));
    out << "\" fill=\"none\" stroke=\"#2563eb\" stroke-width=\"1\"/>\n";

    for (const auto& e : log.events)
      out << "  <circle cx=\"" << px(sx(e.pose.position.x())) << "\" cy=\""
          << px(sy(e.pose.position.z())) << "\" r=\"4\" fill=\"#16a34a\"/>\n";

    const auto& start = log.samples.front().state.position;
    out << "  <circle cx=\"" << px(sx(start.x())) << "\" cy=\"" << px(sy(start.z()))
        << "\" r=\"5\" fill=\"#111111\"/>\n";
    out << "  <circle cx=\"" << px(sx(last.x())) << "\" cy=\"" << px(sy(last.z()))
        << "\" r=\"5\" fill=\"#dc2626\"/>\n";
  }

  out << "</svg>\n";
  return out.str();
}

void export_log(const TrajectoryLog& log, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  write_file((dir / "trajectory.csv").string(), csv_text(log));
  write_file((dir / "metrics.json").string(), metrics_json_text(log));
  write_file((dir / "trajectory.svg").string(), svg_text(log));
}

}  // namespace girder
