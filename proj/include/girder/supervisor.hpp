#pragma once

#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "girder/control.hpp"
#include "girder/gtsp.hpp"
#include "girder/lidar.hpp"
#include "girder/perception.hpp"

namespace girder {

// a plan asks for a routine handoff no predicate can detect
class PlanUnsupportedError : public Error {
 public:
  explicit PlanUnsupportedError(const std::string& msg) : Error(msg) {}
};

struct TransitionPredicate {
  std::string name;
  double sector_lo = 0.0;  // bearing sector for the point count feature
  double sector_hi = 2.0 * kPi;
  double ratio_threshold = 2.0;
  int debounce_scans = 3;
  double travel_fraction_guard = 0.5;  // of planned leg length
  double fire_distance = 0.5;          // meters above the exit elevation
  int baseline_window = 10;
  int baseline_min = 3;
};

struct SwitchEvent {
  int from_leg = 0;
  int to_leg = 0;
  std::string trigger;
  Pose pose;
  double timestamp = 0.0;
};

struct SupervisorConfig {
  TransitionPredicate column_to_girder{.name = "point_count_ratio"};
  TransitionPredicate girder_to_column{.name = "column_profile"};
  TransitionPredicate descent_end{.name = "descent_end"};
  HoughParams hough;
  CharacteristicWindow profile_window{90.0, 15.0, 8.0, 1e9};
  double filter_near = 0.5;
  double filter_far = 25.0;
};

// point count history while the trigger is quiet, plus the debounce counter
struct CountBaseline {
  std::deque<int> counts;
  int debounce = 0;
  double median() const;
};

struct DebounceState {
  int count = 0;
};

// the horizontal point count jumps past ratio_threshold times the running
// median when the girder enters the scan plane
bool detect_column_to_girder(CountBaseline& st, const Scan& horiz, const TransitionPredicate& p);

// a long near-vertical profile line in the vertical scan marks a column
// crossing; the travel guard masks the departure column
bool detect_girder_to_column(DebounceState& st, const Scan& vert, const TransitionPredicate& p,
                             const HoughParams& hough, const CharacteristicWindow& profile,
                             double filter_near, double filter_far, double traveled,
                             double leg_length);

// the profile line's lower end gives height above the column base
bool detect_column_descent_end(DebounceState& st, const Scan& vert, const TransitionPredicate& p,
                               const HoughParams& hough, const CharacteristicWindow& profile,
                               double filter_near, double filter_far, double exit_above_base);

struct StepResult {
  std::optional<RoutineKind> routine;  // empty once the mission completed (hover)
  std::optional<SwitchEvent> event;
};

class Supervisor {
 public:
  // model must be in meters and match the plan's node positions
  Supervisor(InspectionPlan plan, const BridgeModel& m, SupervisorConfig cfg);

  StepResult step(const Scan& horiz, const Scan& vert);
  void advance_travel(const VelocityCommand& cmd, double dt);

  bool completed() const { return leg_index_ >= static_cast<int>(plan_.legs.size()); }
  int leg_index() const { return leg_index_; }
  // a descent leg climbs back to the girder after its coverage pass; true
  // while that regulated re-ascent is running
  bool ascending() const { return ascending_; }
  double traveled() const { return traveled_; }
  const InspectionPlan& plan() const { return plan_; }
  const std::vector<SwitchEvent>& events() const { return events_; }
  std::optional<double> completion_time() const { return completion_time_; }

 private:
  enum class transition { girder_count, column_profile, descent_end };

  struct leg_info {
    transition exit_by = transition::descent_end;
    double length = 0.0;
    double exit_above_base = 0.0;
  };

  void reset_detectors();

  InspectionPlan plan_;
  SupervisorConfig cfg_;
  std::vector<leg_info> info_;
  int leg_index_ = 0;
  bool ascending_ = false;
  double traveled_ = 0.0;
  CountBaseline count_state_;
  DebounceState line_state_;
  std::vector<SwitchEvent> events_;
  std::optional<double> completion_time_;
};

Supervisor make_supervisor(InspectionPlan plan, const BridgeModel& m, SupervisorConfig cfg);

}  // namespace girder
