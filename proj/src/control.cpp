#include "girder/control.hpp"

#include <algorithm>
#include <cmath>

namespace girder {

double pid_step(PidState& state, const PidGains& g, double error, double dt) {
  if (!(dt > 0.0)) throw Error("pid_step: dt must be positive");
  state.integral += error * dt;
  if (g.ki > 0.0) {
    double cap = g.integral_limit / g.ki;
    state.integral = std::clamp(state.integral, -cap, cap);
  }
  double derivative = state.initialized ? (error - state.prev_error) / dt : 0.0;
  state.prev_error = error;
  state.initialized = true;
  double out = g.kp * error + g.ki * state.integral + g.kd * derivative;
  return std::clamp(out, -g.output_limit, g.output_limit);
}

RoutineSpec default_routine_spec(RoutineKind kind) {
  RoutineSpec spec;
  spec.kind = kind;
  if (kind == RoutineKind::column_up || kind == RoutineKind::column_down)
    spec.along_setpoint = 0.0;
  return spec;
}

namespace {

Vec3 travel_velocity(RoutineKind kind, double speed) {
  switch (kind) {
    case RoutineKind::girder_right: return {0.0, -speed, 0.0};  // body right
    case RoutineKind::girder_left: return {0.0, speed, 0.0};
    case RoutineKind::column_up: return {0.0, 0.0, speed};
    case RoutineKind::column_down: return {0.0, 0.0, -speed};
    default:
      throw Error("routine " + to_string(kind) + " has no controller");
  }
}

}  // namespace

VelocityCommand routine_command(const RoutineSpec& spec, const SurfaceEstimate& est,
                                std::optional<double> horiz_theta_deg, ControlState& state,
                                double dt) {
  if (!est.fresh) {
    if (!state.has_command) {
      // nothing to hold yet on this leg, creep along the travel axis
      VelocityCommand cmd;
      cmd.v_body = travel_velocity(spec.kind, spec.nominal_speed);
      state.last_command = cmd;
      state.has_command = true;
      return cmd;
    }
    ++state.held_scans;
    if (state.held_scans > kMaxHeldScans) {
      VelocityCommand hover;
      hover.held = true;
      return hover;
    }
    VelocityCommand cmd = state.last_command;
    cmd.held = true;
    return cmd;
  }

  state.held_scans = 0;
  VelocityCommand cmd;
  cmd.v_body = travel_velocity(spec.kind, spec.nominal_speed);
  cmd.v_body.x() = -pid_step(state.standoff_pid, spec.gains,
                             spec.standoff_setpoint - est.standoff, dt);
  double along_out = -pid_step(state.along_pid, spec.gains,
                               spec.along_setpoint - est.along_offset, dt);
  if (spec.kind == RoutineKind::girder_right || spec.kind == RoutineKind::girder_left)
    cmd.v_body.z() = along_out;
  else
    cmd.v_body.y() = along_out;

  if (horiz_theta_deg) {
    double err = deg2rad(*horiz_theta_deg - 90.0);
    cmd.yaw_rate = std::clamp(spec.yaw_gain * err, -spec.yaw_rate_limit, spec.yaw_rate_limit);
  }
  state.last_command = cmd;
  state.has_command = true;
  return cmd;
}

}  // namespace girder
