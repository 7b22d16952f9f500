#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "girder/control.hpp"
#include "girder/geometry.hpp"
#include "girder/gtsp.hpp"
#include "girder/lidar.hpp"
#include "girder/perception.hpp"
#include "girder/supervisor.hpp"
#include "girder/types.hpp"

namespace girder {

struct WindModel {
  Vec3 steady{0.0, 0.0, 0.0};
  Vec3 gust_amplitude{0.0, 0.0, 0.0};
  double gust_period = 0.0;  // seconds, 0 disables the gust term

  Vec3 at(double t) const;
};

struct SimConfig {
  double dt = 0.05;
  double velocity_time_constant = 0.4;
  WindModel wind;
  double duration_limit = 900.0;
  std::uint64_t rng_seed = 1;
};

struct UavState {
  Point3 position{0.0, 0.0, 0.0};
  Vec3 velocity{0.0, 0.0, 0.0};
  double yaw = 0.0;
};

struct TrajectorySample {
  double t = 0.0;
  UavState state;
  RoutineKind routine = RoutineKind::girder_right;
  double standoff_err = 0.0;  // estimate minus setpoint, nan while stale
  double along_err = 0.0;
  VelocityCommand command;
};

struct LegMetrics {
  int leg_index = 0;
  std::string surface_id;
  RoutineKind routine = RoutineKind::girder_right;
  double start_time = 0.0;
  double end_time = 0.0;
  double max_standoff_err = 0.0;  // magnitudes over fresh samples
  double rms_standoff_err = 0.0;
  double max_along_err = 0.0;
  double rms_along_err = 0.0;
};

struct MissionMetrics {
  bool completed = false;
  double mission_time = 0.0;
  std::string timeout_diagnostic;  // empty when completed
  std::vector<LegMetrics> legs;
};

struct TrajectoryLog {
  std::vector<TrajectorySample> samples;
  std::vector<SwitchEvent> events;
  MissionMetrics metrics;
  std::vector<std::vector<Point3>> surface_outlines;  // closed loops, for the plot
};

// windows and filters shared by control-side estimation
struct PerceptionSetup {
  HoughParams hough;
  CharacteristicWindow girder_window{90.0, 15.0, 3.0, 5.0};
  CharacteristicWindow column_window{90.0, 15.0, 1.0, 6.0};
  CharacteristicWindow yaw_window{90.0, 25.0, 1.0, 1e9};
  CharacteristicWindow profile_window{90.0, 15.0, 8.0, 1e9};
  double filter_near = 0.5;
  double filter_far = 25.0;
};

struct MissionConfig {
  SimConfig sim;
  LidarSpec lidar;
  PidGains gains;
  double standoff_setpoint = 4.5;
  double girder_along_setpoint = 2.5;
  double nominal_speed = 0.5;
  double yaw_gain = 1.0;
  double yaw_rate_limit = 0.5;
  PerceptionSetup perception;
  SupervisorConfig supervisor;  // hough/profile/filters mirrored from perception
};

MissionConfig load_mission_config(const std::string& text);
MissionConfig load_mission_config_file(const std::string& path);

RoutineSpec routine_spec_for(RoutineKind kind, const MissionConfig& cfg);

// estimate and yaw reference extracted from one scan pair for a routine
struct RoutineObservation {
  std::optional<SurfaceEstimate> estimate;
  std::optional<double> horiz_theta;
};

RoutineObservation observe(const Scan& horiz, const Scan& vert, RoutineKind kind,
                           const PerceptionSetup& p);

// hands the last estimate to control for up to two scan periods
class EstimateTracker {
 public:
  void update(const std::optional<SurfaceEstimate>& est);
  void reset();
  SurfaceEstimate current() const;

 private:
  std::optional<SurfaceEstimate> last_;
  int age_ = 0;
};

UavState step_dynamics(const UavState& s, const VelocityCommand& cmd, const SimConfig& c,
                       double t);

std::uint64_t scan_seed(std::uint64_t mission_seed, std::uint64_t scan_tick, ScanPlane plane);

// closed loop for a single routine, no supervisor; runs for the full duration
struct RoutineRunResult {
  std::vector<TrajectorySample> samples;
  UavState final_state;
};

RoutineRunResult run_routine(const BridgeModel& m, RoutineKind kind, const Pose& start,
                             double duration, const MissionConfig& cfg);

TrajectoryLog run_mission(const BridgeModel& m, const InspectionPlan& plan,
                          const MissionConfig& cfg);

MissionMetrics compute_metrics(const std::vector<TrajectorySample>& samples,
                               const std::vector<SwitchEvent>& events, const InspectionPlan& plan,
                               bool completed, double mission_time,
                               const std::string& diagnostic);

}  // namespace girder
