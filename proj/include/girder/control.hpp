#pragma once

#include <optional>

#include "girder/perception.hpp"
#include "girder/types.hpp"

namespace girder {

struct PidGains {
  double kp = 0.8;
  double ki = 0.05;
  double kd = 0.1;
  double output_limit = 1.5;    // m/s
  double integral_limit = 2.0;  // m/s contributed by the integral term
};

struct PidState {
  double integral = 0.0;
  double prev_error = 0.0;
  bool initialized = false;
};

struct RoutineSpec {
  RoutineKind kind = RoutineKind::girder_right;
  double standoff_setpoint = 4.5;
  double along_setpoint = 2.5;  // depth below girder top; 0 for column centering
  double nominal_speed = 0.5;
  PidGains gains;
  double yaw_gain = 1.0;        // rad/s per rad of heading error
  double yaw_rate_limit = 0.5;  // rad/s
};

struct VelocityCommand {
  Vec3 v_body{0.0, 0.0, 0.0};  // forward, left, up
  double yaw_rate = 0.0;
  double timestamp = 0.0;
  bool held = false;
};

struct ControlState {
  PidState standoff_pid;
  PidState along_pid;
  VelocityCommand last_command;
  bool has_command = false;
  int held_scans = 0;
};

// held commands survive this many scans before the failsafe hover kicks in
inline constexpr int kMaxHeldScans = 5;

double pid_step(PidState& state, const PidGains& g, double error, double dt);

// spec defaults for a routine kind (column modes center instead of holding depth)
RoutineSpec default_routine_spec(RoutineKind kind);

// one control tick. fresh estimates drive the two PID loops plus nominal
// travel; a stale estimate re-issues the previous command (or bare nominal
// travel when the leg has none yet) until the failsafe hover.
// horiz_theta_deg, when present, regulates yaw toward a face-perpendicular
// heading (face trace reads 90 degrees).
VelocityCommand routine_command(const RoutineSpec& spec, const SurfaceEstimate& est,
                                std::optional<double> horiz_theta_deg, ControlState& state,
                                double dt);

}  // namespace girder
