#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "girder/export.hpp"
#include "girder/gtsp.hpp"
#include "json.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw girder::Error("cannot read " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw girder::Error("cannot write " + path);
  out << text;
}

girder::Vec3 parse_vec3(const std::string& s) {
  double x = 0.0, y = 0.0, z = 0.0;
  if (std::sscanf(s.c_str(), "%lf,%lf,%lf", &x, &y, &z) != 3)
    throw girder::Error("expected three comma-separated numbers, got '" + s + "'");
  return girder::Vec3(x, y, z);
}

girder::Pose parse_pose(const std::string& s) {
  double x = 0.0, y = 0.0, z = 0.0, yaw_deg = 0.0;
  if (std::sscanf(s.c_str(), "%lf,%lf,%lf,%lf", &x, &y, &z, &yaw_deg) != 4)
    throw girder::Error("expected x,y,z,yaw_deg, got '" + s + "'");
  girder::Pose p;
  p.position = girder::Point3(x, y, z);
  p.yaw = girder::deg2rad(yaw_deg);
  return p;
}

int run_plan(const std::string& bridge_path, const std::string& out_path, std::uint64_t seed,
             int iterations, int restarts, const std::string& start_cluster, bool exact) {
  auto t0 = std::chrono::steady_clock::now();
  girder::BridgeModel m = girder::load_bridge_file(bridge_path);
  girder::GtspInstance inst =
      girder::add_depot(girder::prune_infeasible(girder::build_instance(m), m), start_cluster);

  girder::Tour tour;
  if (exact) {
    tour = girder::solve_exact(inst);
  } else {
    girder::SolverParams params;
    params.seed = seed;
    params.iterations = iterations;
    params.restarts = restarts;
    tour = girder::solve_heuristic(inst, params);
  }
  girder::InspectionPlan plan = girder::expand_tour(tour, inst, m);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  write_file(out_path, girder::serialize_plan(plan, tour.total_cost));
  std::printf("plan: %zu legs, cost %.6f, solver %s, %.3f s, wrote %s\n", plan.legs.size(),
              tour.total_cost, exact ? "exact" : "heuristic", secs, out_path.c_str());
  for (const auto& leg : plan.legs)
    std::printf("  %s %s (node %d -> %d)\n", girder::to_string(leg.routine).c_str(),
                leg.surface_id.c_str(), leg.entry, leg.exit);
  return 0;
}

int run_simulate(const std::string& bridge_path, const std::string& plan_path,
                 const std::string& mission_path, bool seed_set, std::uint64_t seed,
                 const std::string& wind, const std::string& out_dir) {
  girder::BridgeModel m = girder::load_bridge_file(bridge_path);
  girder::InspectionPlan plan = girder::parse_plan(read_file(plan_path));
  girder::MissionConfig cfg;
  if (!mission_path.empty()) cfg = girder::load_mission_config_file(mission_path);
  if (seed_set) cfg.sim.rng_seed = seed;
  if (!wind.empty()) cfg.sim.wind.steady = parse_vec3(wind);

  girder::TrajectoryLog log = girder::run_mission(m, plan, cfg);
  girder::export_log(log, out_dir);

  if (log.metrics.completed) {
    std::printf("mission completed in %.2f s simulated time, %zu switch events\n",
                log.metrics.mission_time, log.events.size());
  } else {
    std::printf("%s\n", log.metrics.timeout_diagnostic.c_str());
  }
  std::printf("wrote %s/trajectory.csv, metrics.json, trajectory.svg\n", out_dir.c_str());
  return log.metrics.completed ? 0 : 2;
}

int run_scan_debug(const std::string& bridge_path, const std::string& mission_path,
                   const std::string& pose_str, const std::string& plane_str, std::uint64_t seed,
                   const std::string& prefix) {
  girder::BridgeModel m = girder::scaled_to_meters(girder::load_bridge_file(bridge_path));
  girder::MissionConfig cfg;
  if (!mission_path.empty()) cfg = girder::load_mission_config_file(mission_path);
  girder::Pose pose = parse_pose(pose_str);
  girder::ScanPlane plane =
      plane_str == "v" ? girder::ScanPlane::vertical : girder::ScanPlane::horizontal;

  girder::Scan scan = girder::simulate_scan(m, pose, plane, cfg.lidar, seed);
  std::vector<girder::Vec2> pts =
      girder::filter_points(scan, cfg.perception.filter_near, cfg.perception.filter_far);
  std::vector<girder::LineEstimate> lines = girder::hough_lines(pts, cfg.perception.hough);

  std::ostringstream csv;
  csv << "bearing,range\n";
  for (const auto& p : scan.points) {
    char row[80];
    std::snprintf(row, sizeof(row), "%.17g,%.17g\n", p.bearing, p.range);
    csv << row;
  }
  write_file(prefix + ".csv", csv.str());

  double lo_x = -1.0, hi_x = 1.0, lo_y = -1.0, hi_y = 1.0;
  for (const auto& p : pts) {
    lo_x = std::min(lo_x, p.x());
    hi_x = std::max(hi_x, p.x());
    lo_y = std::min(lo_y, p.y());
    hi_y = std::max(hi_y, p.y());
  }
  const double margin = 30.0;
  const double k = 700.0 / std::max(hi_x - lo_x, 1e-6);
  const double w = 700.0 + 2.0 * margin;
  const double h = (hi_y - lo_y) * k + 2.0 * margin;
  auto sx = [&](double x) { return margin + (x - lo_x) * k; };
  auto sy = [&](double y) { return margin + (hi_y - y) * k; };
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\">\n  <rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  svg << "  <circle cx=\"" << sx(0.0) << "\" cy=\"" << sy(0.0)
      << "\" r=\"5\" fill=\"#111111\"/>\n";
  for (const auto& p : pts)
    svg << "  <circle cx=\"" << sx(p.x()) << "\" cy=\"" << sy(p.y())
        << "\" r=\"1.5\" fill=\"#2563eb\"/>\n";
  for (const auto& l : lines)
    svg << "  <line x1=\"" << sx(l.endpoints[0].x()) << "\" y1=\"" << sy(l.endpoints[0].y())
        << "\" x2=\"" << sx(l.endpoints[1].x()) << "\" y2=\"" << sy(l.endpoints[1].y())
        << "\" stroke=\"#dc2626\" stroke-width=\"2\"/>\n";
  svg << "</svg>\n";
  write_file(prefix + ".svg", svg.str());

  std::printf("%zu points, %zu lines, wrote %s.csv and %s.svg\n", scan.points.size(),
              lines.size(), prefix.c_str(), prefix.c_str());
  std::printf("%8s %10s %8s %8s\n", "theta", "rho", "extent", "inliers");
  for (const auto& l : lines)
    std::printf("%8.2f %10.3f %8.2f %8d\n", l.theta, l.rho, l.extent, l.inlier_count);
  return 0;
}

int run_report(const std::string& out_dir) {
  nlohmann::json j = nlohmann::json::parse(read_file(out_dir + "/metrics.json"));

  std::vector<girder::TrajectorySample> samples;
  std::istringstream csv(read_file(out_dir + "/trajectory.csv"));
  std::string line;
  std::getline(csv, line);  // header
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() != 11) throw girder::Error("bad csv row: " + line);
    girder::TrajectorySample s;
    s.t = std::stod(cells[0]);
    s.standoff_err = std::stod(cells[6]);
    s.along_err = std::stod(cells[7]);
    samples.push_back(s);
  }

  std::vector<girder::SwitchEvent> events;
  for (const auto& je : j.at("events")) {
    girder::SwitchEvent e;
    e.timestamp = je.at("t").get<double>();
    events.push_back(e);
  }
  girder::InspectionPlan plan;
  for (const auto& jl : j.at("legs")) {
    girder::PlanLeg leg;
    leg.surface_id = jl.at("surface").get<std::string>();
    leg.routine = girder::routine_kind_from_string(jl.at("routine").get<std::string>());
    plan.legs.push_back(leg);
  }

  girder::MissionMetrics recomputed = girder::compute_metrics(
      samples, events, plan, j.at("completed").get<bool>(), j.at("mission_time").get<double>(),
      j.value("timeout_diagnostic", std::string()));

  std::printf("mission %s, %.2f s, %zu events\n",
              j.at("completed").get<bool>() ? "completed" : "timed out",
              j.at("mission_time").get<double>(), events.size());
  std::printf("%4s %8s %8s %10s %14s %14s %12s %12s\n", "leg", "surface", "routine", "duration",
              "max_standoff", "rms_standoff", "max_along", "rms_along");

  bool consistent = true;
  const auto& jlegs = j.at("legs");
  for (std::size_t i = 0; i < recomputed.legs.size(); ++i) {
    const auto& l = recomputed.legs[i];
    std::printf("%4d %8s %8s %9.1fs %14.4f %14.4f %12.4f %12.4f\n", l.leg_index,
                l.surface_id.c_str(), girder::to_string(l.routine).c_str(),
                l.end_time - l.start_time, l.max_standoff_err, l.rms_standoff_err,
                l.max_along_err, l.rms_along_err);
    if (i < jlegs.size()) {
      const auto& jl = jlegs[static_cast<int>(i)];
      auto off = [&](const char* key, double v) {
        return std::abs(jl.at(key).get<double>() - v) > 1e-9;
      };
      if (off("max_standoff_err", l.max_standoff_err) ||
          off("rms_standoff_err", l.rms_standoff_err) || off("max_along_err", l.max_along_err) ||
          off("rms_along_err", l.rms_along_err))
        consistent = false;
    }
  }
  if (recomputed.legs.size() != jlegs.size()) consistent = false;

  if (!consistent) {
    std::printf("stored metrics do not match the trajectory\n");
    return 3;
  }
  std::printf("stored metrics match the trajectory\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coverage planning and closed-loop inspection simulation for box girder bridges"};
  app.require_subcommand(1);

  std::string bridge_path, plan_out = "plan.out", start_cluster, plan_path, mission_path;
  std::string wind, out_dir = "out", pose_str, plane_str = "h", prefix = "scan";
  std::uint64_t seed = 1;
  int iterations = 2500, restarts = 3;
  bool exact = false;

  CLI::App* plan = app.add_subcommand("plan", "compute a coverage tour for a bridge model");
  plan->add_option("bridge", bridge_path, "bridge model config")->required();
  plan->add_option("-o,--output", plan_out, "plan file to write");
  plan->add_option("--seed", seed, "heuristic rng seed");
  plan->add_option("--iterations", iterations, "heuristic iterations per restart");
  plan->add_option("--restarts", restarts, "heuristic restarts");
  plan->add_option("--start", start_cluster, "anchor the path start to this surface");
  plan->add_flag("--exact", exact, "branch and bound instead of the heuristic");

  CLI::App* sim = app.add_subcommand("simulate", "fly a plan in the closed-loop simulator");
  sim->add_option("bridge", bridge_path, "bridge model config")->required();
  sim->add_option("plan", plan_path, "plan file from the plan subcommand")->required();
  sim->add_option("--mission", mission_path, "mission config overriding the defaults");
  CLI::Option* seed_opt = sim->add_option("--seed", seed, "simulation rng seed");
  sim->add_option("--wind", wind, "steady wind vector wx,wy,wz in m/s");
  sim->add_option("-o,--output", out_dir, "directory for trajectory.csv, metrics.json, trajectory.svg");

  CLI::App* scan = app.add_subcommand("scan-debug", "render one synthetic scan and its lines");
  scan->add_option("bridge", bridge_path, "bridge model config")->required();
  scan->add_option("--pose", pose_str, "sensor pose x,y,z,yaw_deg")->required();
  scan->add_option("--plane", plane_str, "h or v")->check(CLI::IsMember({"h", "v"}));
  scan->add_option("--mission", mission_path, "mission config overriding the defaults");
  scan->add_option("--seed", seed, "scan rng seed");
  scan->add_option("-o,--output", prefix, "output file prefix");

  CLI::App* rep = app.add_subcommand("report", "summarize a simulation output directory");
  rep->add_option("outdir", out_dir, "directory written by simulate")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (plan->parsed())
      return run_plan(bridge_path, plan_out, seed, iterations, restarts, start_cluster, exact);
    if (sim->parsed())
      return run_simulate(bridge_path, plan_path, mission_path, seed_opt->count() > 0, seed, wind,
                          out_dir);
    if (scan->parsed())
      return run_scan_debug(bridge_path, mission_path, pose_str, plane_str, seed, prefix);
    if (rep->parsed()) return run_report(out_dir);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
