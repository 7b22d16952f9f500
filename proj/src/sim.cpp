#include "girder/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <utility>

#include "girder/config.hpp"

namespace girder {

namespace {

constexpr int kEstimateMaxAge = 2;  // scan periods before an estimate goes stale

void require_fields(const ConfigValue& table, std::initializer_list<const char*> allowed,
                    const std::string& ctx) {
  for (const auto& [key, value] : table.entries) {
    bool known = false;
    for (const char* a : allowed)
      if (key == a) known = true;
    if (!known) throw ConfigError("unknown field '" + key + "' in " + ctx, value.line);
  }
}

Vec3 vec3_or(const ConfigValue& t, const std::string& key, const Vec3& fallback) {
  const ConfigValue* v = t.find(key);
  if (v == nullptr) return fallback;
  const auto& items = v->as_array();
  if (items.size() != 3) throw ConfigError("'" + key + "' needs exactly 3 numbers", v->line);
  return Vec3(items[0].as_number(), items[1].as_number(), items[2].as_number());
}

int int_or(const ConfigValue& t, const std::string& key, int fallback) {
  return static_cast<int>(std::llround(t.number_or(key, fallback)));
}

void read_window(const ConfigValue* t, CharacteristicWindow& w, const std::string& ctx) {
  if (t == nullptr) return;
  require_fields(*t, {"slope_center", "slope_tolerance", "extent_min", "extent_max"}, ctx);
  w.slope_center = t->number_or("slope_center", w.slope_center);
  w.slope_tolerance = t->number_or("slope_tolerance", w.slope_tolerance);
  w.extent_min = t->number_or("extent_min", w.extent_min);
  w.extent_max = t->number_or("extent_max", w.extent_max);
}

bool is_column_routine(RoutineKind k) {
  return k == RoutineKind::column_up || k == RoutineKind::column_down;
}

TrajectorySample make_sample(double t, const UavState& state, RoutineKind kind,
                             const SurfaceEstimate& est, const RoutineSpec& spec,
                             const VelocityCommand& cmd) {
  TrajectorySample s;
  s.t = t;
  s.state = state;
  s.routine = kind;
  if (est.fresh) {
    s.standoff_err = est.standoff - spec.standoff_setpoint;
    s.along_err = est.along_offset - spec.along_setpoint;
  } else {
    s.standoff_err = std::numeric_limits<double>::quiet_NaN();
    s.along_err = std::numeric_limits<double>::quiet_NaN();
  }
  s.command = cmd;
  return s;
}

void check_loop_config(const MissionConfig& cfg) {
  if (!(cfg.sim.dt > 0.0)) throw Error("sim dt must be positive");
  if (!(cfg.sim.velocity_time_constant > 0.0))
    throw Error("velocity time constant must be positive");
  if (!(cfg.lidar.scan_rate > 0.0)) throw Error("scan rate must be positive");
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

Vec3 WindModel::at(double t) const {
  Vec3 w = steady;
  if (gust_period > 0.0) w += gust_amplitude * std::sin(2.0 * kPi * t / gust_period);
  return w;
}

namespace {

MissionConfig mission_from_tree(const ConfigValue& root) {
  require_fields(root, {"sim", "lidar", "gains", "routine", "perception", "windows", "supervisor"},
                 "mission config");
  MissionConfig cfg;

  if (const ConfigValue* t = root.find("sim")) {
    require_fields(*t,
                   {"dt", "velocity_time_constant", "duration_limit", "rng_seed", "wind_steady",
                    "wind_gust_amplitude", "wind_gust_period"},
                   "[sim]");
    cfg.sim.dt = t->number_or("dt", cfg.sim.dt);
    cfg.sim.velocity_time_constant =
        t->number_or("velocity_time_constant", cfg.sim.velocity_time_constant);
    cfg.sim.duration_limit = t->number_or("duration_limit", cfg.sim.duration_limit);
    cfg.sim.rng_seed = static_cast<std::uint64_t>(
        t->number_or("rng_seed", static_cast<double>(cfg.sim.rng_seed)));
    cfg.sim.wind.steady = vec3_or(*t, "wind_steady", cfg.sim.wind.steady);
    cfg.sim.wind.gust_amplitude = vec3_or(*t, "wind_gust_amplitude", cfg.sim.wind.gust_amplitude);
    cfg.sim.wind.gust_period = t->number_or("wind_gust_period", cfg.sim.wind.gust_period);
  }

  if (const ConfigValue* t = root.find("lidar")) {
    require_fields(
        *t, {"max_range", "angular_resolution_deg", "scan_rate", "range_noise_sigma", "min_range"},
        "[lidar]");
    cfg.lidar.max_range = t->number_or("max_range", cfg.lidar.max_range);
    cfg.lidar.angular_resolution = deg2rad(
        t->number_or("angular_resolution_deg", rad2deg(cfg.lidar.angular_resolution)));
    cfg.lidar.scan_rate = t->number_or("scan_rate", cfg.lidar.scan_rate);
    cfg.lidar.range_noise_sigma = t->number_or("range_noise_sigma", cfg.lidar.range_noise_sigma);
    cfg.lidar.min_range = t->number_or("min_range", cfg.lidar.min_range);
  }

  if (const ConfigValue* t = root.find("gains")) {
    require_fields(*t, {"kp", "ki", "kd", "output_limit", "integral_limit"}, "[gains]");
    cfg.gains.kp = t->number_or("kp", cfg.gains.kp);
    cfg.gains.ki = t->number_or("ki", cfg.gains.ki);
    cfg.gains.kd = t->number_or("kd", cfg.gains.kd);
    cfg.gains.output_limit = t->number_or("output_limit", cfg.gains.output_limit);
    cfg.gains.integral_limit = t->number_or("integral_limit", cfg.gains.integral_limit);
  }

  if (const ConfigValue* t = root.find("routine")) {
    require_fields(*t,
                   {"standoff_setpoint", "girder_along_setpoint", "nominal_speed", "yaw_gain",
                    "yaw_rate_limit"},
                   "[routine]");
    cfg.standoff_setpoint = t->number_or("standoff_setpoint", cfg.standoff_setpoint);
    cfg.girder_along_setpoint = t->number_or("girder_along_setpoint", cfg.girder_along_setpoint);
    cfg.nominal_speed = t->number_or("nominal_speed", cfg.nominal_speed);
    cfg.yaw_gain = t->number_or("yaw_gain", cfg.yaw_gain);
    cfg.yaw_rate_limit = t->number_or("yaw_rate_limit", cfg.yaw_rate_limit);
  }

  if (const ConfigValue* t = root.find("perception")) {
    require_fields(*t,
                   {"theta_bins", "rho_bin_width", "inlier_distance", "min_inliers",
                    "nms_theta_window", "nms_rho_window", "filter_near", "filter_far"},
                   "[perception]");
    HoughParams& h = cfg.perception.hough;
    h.theta_bins = int_or(*t, "theta_bins", h.theta_bins);
    h.rho_bin_width = t->number_or("rho_bin_width", h.rho_bin_width);
    h.inlier_distance = t->number_or("inlier_distance", h.inlier_distance);
    h.min_inliers = int_or(*t, "min_inliers", h.min_inliers);
    h.nms_theta_window = int_or(*t, "nms_theta_window", h.nms_theta_window);
    h.nms_rho_window = int_or(*t, "nms_rho_window", h.nms_rho_window);
    cfg.perception.filter_near = t->number_or("filter_near", cfg.perception.filter_near);
    cfg.perception.filter_far = t->number_or("filter_far", cfg.perception.filter_far);
  }

  if (const ConfigValue* t = root.find("windows")) {
    require_fields(*t, {"girder", "column", "yaw", "profile"}, "[windows]");
    read_window(t->find("girder"), cfg.perception.girder_window, "[windows.girder]");
    read_window(t->find("column"), cfg.perception.column_window, "[windows.column]");
    read_window(t->find("yaw"), cfg.perception.yaw_window, "[windows.yaw]");
    read_window(t->find("profile"), cfg.perception.profile_window, "[windows.profile]");
  }

  if (const ConfigValue* t = root.find("supervisor")) {
    require_fields(*t,
                   {"ratio_threshold", "debounce_scans", "travel_fraction_guard", "fire_distance",
                    "baseline_window", "baseline_min", "sector_lo_deg", "sector_hi_deg"},
                   "[supervisor]");
    SupervisorConfig& s = cfg.supervisor;
    s.column_to_girder.ratio_threshold =
        t->number_or("ratio_threshold", s.column_to_girder.ratio_threshold);
    s.column_to_girder.baseline_window =
        int_or(*t, "baseline_window", s.column_to_girder.baseline_window);
    s.column_to_girder.baseline_min = int_or(*t, "baseline_min", s.column_to_girder.baseline_min);
    s.column_to_girder.sector_lo =
        deg2rad(t->number_or("sector_lo_deg", rad2deg(s.column_to_girder.sector_lo)));
    s.column_to_girder.sector_hi =
        deg2rad(t->number_or("sector_hi_deg", rad2deg(s.column_to_girder.sector_hi)));
    int debounce = int_or(*t, "debounce_scans", s.column_to_girder.debounce_scans);
    s.column_to_girder.debounce_scans = debounce;
    s.girder_to_column.debounce_scans = debounce;
    s.descent_end.debounce_scans = debounce;
    s.girder_to_column.travel_fraction_guard =
        t->number_or("travel_fraction_guard", s.girder_to_column.travel_fraction_guard);
    s.descent_end.fire_distance = t->number_or("fire_distance", s.descent_end.fire_distance);
  }

  cfg.supervisor.hough = cfg.perception.hough;
  cfg.supervisor.profile_window = cfg.perception.profile_window;
  cfg.supervisor.filter_near = cfg.perception.filter_near;
  cfg.supervisor.filter_far = cfg.perception.filter_far;
  return cfg;
}

}  // namespace

MissionConfig load_mission_config(const std::string& text) {
  return mission_from_tree(parse_config(text));
}

MissionConfig load_mission_config_file(const std::string& path) {
  return mission_from_tree(parse_config_file(path));
}

RoutineSpec routine_spec_for(RoutineKind kind, const MissionConfig& cfg) {
  RoutineSpec spec;
  spec.kind = kind;
  spec.standoff_setpoint = cfg.standoff_setpoint;
  spec.along_setpoint = is_column_routine(kind) ? 0.0 : cfg.girder_along_setpoint;
  spec.nominal_speed = cfg.nominal_speed;
  spec.gains = cfg.gains;
  spec.yaw_gain = cfg.yaw_gain;
  spec.yaw_rate_limit = cfg.yaw_rate_limit;
  return spec;
}

RoutineObservation observe(const Scan& horiz, const Scan& vert, RoutineKind kind,
                           const PerceptionSetup& p) {
  RoutineObservation obs;
  switch (kind) {
    case RoutineKind::column_up:
    case RoutineKind::column_down: {
      auto pts = filter_points(horiz, p.filter_near, p.filter_far);
      if (pts.empty()) break;
      if (auto line = select_surface_line(hough_lines(pts, p.hough), p.column_window)) {
        obs.estimate = column_offsets(*line);
        obs.horiz_theta = line->theta;
      }
      break;
    }
    case RoutineKind::girder_right:
    case RoutineKind::girder_left: {
      auto vpts = filter_points(vert, p.filter_near, p.filter_far);
      if (!vpts.empty()) {
        if (auto line = select_surface_line(hough_lines(vpts, p.hough), p.girder_window)) {
          obs.estimate = girder_offsets(*line);
          // the girder top edge sits between the last hitting ray and the
          // first miss, so the raw endpoint reads shallow by roughly half a
          // ray spacing
          if (line->inlier_count >= 2)
            obs.estimate->along_offset += 0.5 * line->extent / (line->inlier_count - 1);
        }
      }
      auto hpts = filter_points(horiz, p.filter_near, p.filter_far);
      if (!hpts.empty()) {
        if (auto line = select_surface_line(hough_lines(hpts, p.hough), p.yaw_window))
          obs.horiz_theta = line->theta;
      }
      break;
    }
    default:
      throw Error("no observation pipeline for routine " + to_string(kind));
  }
  return obs;
}

void EstimateTracker::update(const std::optional<SurfaceEstimate>& est) {
  if (est) {
    last_ = est;
    age_ = 0;
  } else if (last_) {
    ++age_;
  }
}

void EstimateTracker::reset() {
  last_.reset();
  age_ = 0;
}

SurfaceEstimate EstimateTracker::current() const {
  if (last_ && age_ <= kEstimateMaxAge) return *last_;
  SurfaceEstimate stale;
  stale.fresh = false;
  return stale;
}

UavState step_dynamics(const UavState& s, const VelocityCommand& cmd, const SimConfig& c,
                       double t) {
  const double cy = std::cos(s.yaw);
  const double sy = std::sin(s.yaw);
  Vec3 world(cy * cmd.v_body.x() - sy * cmd.v_body.y(),
             sy * cmd.v_body.x() + cy * cmd.v_body.y(), cmd.v_body.z());
  Vec3 target = world + c.wind.at(t);
  UavState out = s;
  out.velocity = s.velocity + (target - s.velocity) * (c.dt / c.velocity_time_constant);
  out.position = s.position + out.velocity * c.dt;
  out.yaw = s.yaw + cmd.yaw_rate * c.dt;
  return out;
}

std::uint64_t scan_seed(std::uint64_t mission_seed, std::uint64_t scan_tick, ScanPlane plane) {
  std::uint64_t stream = scan_tick * 2 + (plane == ScanPlane::vertical ? 1 : 0);
  return splitmix64(mission_seed ^ splitmix64(stream));
}

RoutineRunResult run_routine(const BridgeModel& m, RoutineKind kind, const Pose& start,
                             double duration, const MissionConfig& cfg) {
  check_loop_config(cfg);
  if (!(duration > 0.0)) throw Error("routine run duration must be positive");

  BridgeModel scaled = scaled_to_meters(m);
  RoutineSpec spec = routine_spec_for(kind, cfg);

  UavState state;
  state.position = start.position;
  state.yaw = start.yaw;

  const double scan_period = 1.0 / cfg.lidar.scan_rate;
  const int steps_per_scan =
      std::max(1, static_cast<int>(std::lround(scan_period / cfg.sim.dt)));

  EstimateTracker tracker;
  ControlState cstate;
  VelocityCommand cmd;
  SurfaceEstimate cur;

  RoutineRunResult out;
  out.samples.push_back(make_sample(0.0, state, kind, cur, spec, cmd));

  std::uint64_t tick = 0;
  long step = 0;
  double t = 0.0;
  while (t < duration - 0.5 * cfg.sim.dt) {
    if (step % steps_per_scan == 0) {
      Pose pose{state.position, state.yaw};
      Scan horiz = simulate_scan(scaled, pose, ScanPlane::horizontal, cfg.lidar,
                                 scan_seed(cfg.sim.rng_seed, tick, ScanPlane::horizontal), t);
      Scan vert = simulate_scan(scaled, pose, ScanPlane::vertical, cfg.lidar,
                                scan_seed(cfg.sim.rng_seed, tick, ScanPlane::vertical), t);
      ++tick;
      RoutineObservation obs = observe(horiz, vert, kind, cfg.perception);
      tracker.update(obs.estimate);
      cur = tracker.current();
      cmd = routine_command(spec, cur, obs.horiz_theta, cstate, scan_period);
      cmd.timestamp = t;
    }
    state = step_dynamics(state, cmd, cfg.sim, t);
    ++step;
    t = static_cast<double>(step) * cfg.sim.dt;
    out.samples.push_back(make_sample(t, state, kind, cur, spec, cmd));
  }
  out.final_state = state;
  return out;
}

TrajectoryLog run_mission(const BridgeModel& m, const InspectionPlan& plan,
                          const MissionConfig& cfg) {
  check_loop_config(cfg);
  if (!(cfg.sim.duration_limit > 0.0)) throw Error("duration limit must be positive");

  BridgeModel scaled = scaled_to_meters(m);
  TrajectoryLog log;
  for (const auto& s : scaled.surfaces)
    log.surface_outlines.emplace_back(s.vertices.begin(), s.vertices.end());

  if (plan.legs.empty()) {
    log.metrics.completed = true;
    return log;
  }

  InspectionPlan meters_plan = plan;
  for (auto& leg : meters_plan.legs) {
    leg.entry_position *= m.distance_scale;
    leg.exit_position *= m.distance_scale;
  }

  Supervisor sup = make_supervisor(meters_plan, scaled, cfg.supervisor);

  const PlanLeg& first = meters_plan.legs.front();
  const SurfacePolygon& first_surface = scaled.surface(first.surface_id);
  UavState state;
  state.position = first.entry_position + cfg.standoff_setpoint * first_surface.plane_normal;
  state.yaw = std::atan2(-first_surface.plane_normal.y(), -first_surface.plane_normal.x());

  const double scan_period = 1.0 / cfg.lidar.scan_rate;
  const int steps_per_scan =
      std::max(1, static_cast<int>(std::lround(scan_period / cfg.sim.dt)));

  EstimateTracker tracker;
  ControlState cstate;
  VelocityCommand cmd;
  SurfaceEstimate cur;
  RoutineKind active = first.routine;
  RoutineSpec spec = routine_spec_for(active, cfg);

  log.samples.push_back(make_sample(0.0, state, active, cur, spec, cmd));

  bool completed = false;
  double mission_time = 0.0;
  std::string diagnostic;
  std::uint64_t tick = 0;
  long step = 0;
  double t = 0.0;

  while (t < cfg.sim.duration_limit - 0.5 * cfg.sim.dt) {
    if (step % steps_per_scan == 0) {
      Pose pose{state.position, state.yaw};
      Scan horiz = simulate_scan(scaled, pose, ScanPlane::horizontal, cfg.lidar,
                                 scan_seed(cfg.sim.rng_seed, tick, ScanPlane::horizontal), t);
      Scan vert = simulate_scan(scaled, pose, ScanPlane::vertical, cfg.lidar,
                                scan_seed(cfg.sim.rng_seed, tick, ScanPlane::vertical), t);
      ++tick;

      StepResult res = sup.step(horiz, vert);
      if (res.event) {
        log.events.push_back(*res.event);
        tracker.reset();
        cstate = ControlState{};
      }
      if (sup.completed()) {
        completed = true;
        mission_time = sup.completion_time().value_or(t);
        break;
      }

      active = *res.routine;
      spec = routine_spec_for(active, cfg);
      RoutineObservation obs = observe(horiz, vert, active, cfg.perception);
      tracker.update(obs.estimate);
      cur = tracker.current();
      cmd = routine_command(spec, cur, obs.horiz_theta, cstate, scan_period);
      cmd.timestamp = t;
      sup.advance_travel(cmd, scan_period);
    }
    state = step_dynamics(state, cmd, cfg.sim, t);
    ++step;
    t = static_cast<double>(step) * cfg.sim.dt;
    log.samples.push_back(make_sample(t, state, active, cur, spec, cmd));
  }

  if (!completed) {
    mission_time = t;
    const PlanLeg& leg = meters_plan.legs[static_cast<std::size_t>(sup.leg_index())];
    char buf[160];
    std::snprintf(buf, sizeof(buf), "timeout after %.1f s on leg %d (surface %s, routine %s)", t,
                  sup.leg_index(), leg.surface_id.c_str(), to_string(leg.routine).c_str());
    diagnostic = buf;
  }

  log.metrics =
      compute_metrics(log.samples, log.events, meters_plan, completed, mission_time, diagnostic);
  return log;
}

MissionMetrics compute_metrics(const std::vector<TrajectorySample>& samples,
                               const std::vector<SwitchEvent>& events, const InspectionPlan& plan,
                               bool completed, double mission_time,
                               const std::string& diagnostic) {
  MissionMetrics out;
  out.completed = completed;
  out.mission_time = mission_time;
  out.timeout_diagnostic = diagnostic;
  if (plan.legs.empty()) return out;

  struct error_acc {
    double sum_sq_standoff = 0.0;
    double sum_sq_along = 0.0;
    double max_standoff = 0.0;
    double max_along = 0.0;
    long n_standoff = 0;
    long n_along = 0;
  };

  const std::size_t leg_count = std::min(plan.legs.size(), events.size() + 1);
  std::vector<error_acc> accs(leg_count);
  std::size_t ev = 0;
  for (const auto& s : samples) {
    while (ev < events.size() && events[ev].timestamp < s.t) ++ev;
    if (ev >= leg_count) break;
    error_acc& a = accs[ev];
    if (std::isfinite(s.standoff_err)) {
      a.sum_sq_standoff += s.standoff_err * s.standoff_err;
      a.max_standoff = std::max(a.max_standoff, std::abs(s.standoff_err));
      ++a.n_standoff;
    }
    if (std::isfinite(s.along_err)) {
      a.sum_sq_along += s.along_err * s.along_err;
      a.max_along = std::max(a.max_along, std::abs(s.along_err));
      ++a.n_along;
    }
  }

  for (std::size_t i = 0; i < leg_count; ++i) {
    const error_acc& a = accs[i];
    LegMetrics lm;
    lm.leg_index = static_cast<int>(i);
    lm.surface_id = plan.legs[i].surface_id;
    lm.routine = plan.legs[i].routine;
    lm.start_time = i == 0 ? (samples.empty() ? 0.0 : samples.front().t)
                           : events[i - 1].timestamp;
    lm.end_time = i < events.size() ? events[i].timestamp : mission_time;
    lm.max_standoff_err = a.max_standoff;
    lm.rms_standoff_err =
        a.n_standoff > 0 ? std::sqrt(a.sum_sq_standoff / static_cast<double>(a.n_standoff)) : 0.0;
    lm.max_along_err = a.max_along;
    lm.rms_along_err =
        a.n_along > 0 ? std::sqrt(a.sum_sq_along / static_cast<double>(a.n_along)) : 0.0;
    out.legs.push_back(lm);
  }
  return out;
}

}  // namespace girder
