#include "girder/supervisor.hpp"

#include <algorithm>
#include <cmath>

namespace girder {

namespace {

bool is_girder_routine(RoutineKind k) {
  return k == RoutineKind::girder_right || k == RoutineKind::girder_left;
}

std::optional<LineEstimate> profile_line(const Scan& vert, const HoughParams& hough,
                                         const CharacteristicWindow& profile, double near,
                                         double far) {
  std::vector<Vec2> pts = filter_points(vert, near, far);
  if (pts.empty()) return std::nullopt;
  return select_surface_line(hough_lines(pts, hough), profile);
}

}  // namespace

double CountBaseline::median() const {
  std::vector<int> sorted(counts.begin(), counts.end());
  std::sort(sorted.begin(), sorted.end());
  std::size_t n = sorted.size();
  if (n == 0) return 0.0;
  if (n % 2 == 1) return sorted[n / 2];
  return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

bool detect_column_to_girder(CountBaseline& st, const Scan& horiz, const TransitionPredicate& p) {
  int count = point_count_feature(horiz, p.sector_lo, p.sector_hi);
  bool satisfied = false;
  if (static_cast<int>(st.counts.size()) >= p.baseline_min)
    satisfied = static_cast<double>(count) >= p.ratio_threshold * std::max(st.median(), 1.0);

  if (!satisfied) {
    st.debounce = 0;
    st.counts.push_back(count);
    while (static_cast<int>(st.counts.size()) > p.baseline_window) st.counts.pop_front();
    return false;
  }
  ++st.debounce;
  return st.debounce >= p.debounce_scans;
}

bool detect_girder_to_column(DebounceState& st, const Scan& vert, const TransitionPredicate& p,
                             const HoughParams& hough, const CharacteristicWindow& profile,
                             double filter_near, double filter_far, double traveled,
                             double leg_length) {
  bool guard = traveled >= p.travel_fraction_guard * leg_length;
  bool satisfied = guard && profile_line(vert, hough, profile, filter_near, filter_far).has_value();
  st.count = satisfied ? st.count + 1 : 0;
  return st.count >= p.debounce_scans;
}

bool detect_column_descent_end(DebounceState& st, const Scan& vert, const TransitionPredicate& p,
                               const HoughParams& hough, const CharacteristicWindow& profile,
                               double filter_near, double filter_far, double exit_above_base) {
  bool satisfied = false;
  if (auto line = profile_line(vert, hough, profile, filter_near, filter_far)) {
    double altitude = -std::min(line->endpoints[0].y(), line->endpoints[1].y());
    satisfied = altitude - exit_above_base <= p.fire_distance;
  }
  st.count = satisfied ? st.count + 1 : 0;
  return st.count >= p.debounce_scans;
}

Supervisor::Supervisor(InspectionPlan plan, const BridgeModel& m, SupervisorConfig cfg)
    : plan_(std::move(plan)), cfg_(std::move(cfg)) {
  for (const auto* p : {&cfg_.column_to_girder, &cfg_.girder_to_column, &cfg_.descent_end}) {
    if (!(p->ratio_threshold > 1.0))
      throw Error("predicate " + p->name + ": ratio threshold must exceed 1");
    if (p->debounce_scans < 1)
      throw Error("predicate " + p->name + ": debounce must be at least 1 scan");
  }

  for (std::size_t i = 0; i < plan_.legs.size(); ++i) {
    const PlanLeg& leg = plan_.legs[i];
    const PlanLeg* next = i + 1 < plan_.legs.size() ? &plan_.legs[i + 1] : nullptr;

    leg_info info;
    info.length = (leg.exit_position - leg.entry_position).norm();
    if (is_girder_routine(leg.routine)) {
      if (next == nullptr || next->routine != RoutineKind::column_down)
        throw PlanUnsupportedError(
            "no predicate for leaving " + to_string(leg.routine) + " except into CD (leg " +
            std::to_string(i) + ", surface " + leg.surface_id + ")");
      info.exit_by = transition::column_profile;
    } else if (leg.routine == RoutineKind::column_up) {
      if (next == nullptr || !is_girder_routine(next->routine))
        throw PlanUnsupportedError("CU can only hand off to a girder routine (leg " +
                                   std::to_string(i) + ", surface " + leg.surface_id + ")");
      info.exit_by = transition::girder_count;
    } else if (leg.routine == RoutineKind::column_down) {
      if (next != nullptr && !is_girder_routine(next->routine))
        throw PlanUnsupportedError("CD can only hand off to a girder routine or end the plan (leg " +
                                   std::to_string(i) + ", surface " + leg.surface_id + ")");
      info.exit_by = transition::descent_end;
      double base = 1e300;
      for (const auto& v : m.surface(leg.surface_id).vertices) base = std::min(base, v.z());
      info.exit_above_base = leg.exit_position.z() - base;
    } else {
      throw PlanUnsupportedError("routine " + to_string(leg.routine) +
                                 " has no local navigation controller (leg " + std::to_string(i) +
                                 ", surface " + leg.surface_id + ")");
    }
    info_.push_back(info);
  }
}

void Supervisor::reset_detectors() {
  count_state_ = CountBaseline{};
  line_state_ = DebounceState{};
  traveled_ = 0.0;
}

StepResult Supervisor::step(const Scan& horiz, const Scan& vert) {
  if (completed()) return {std::nullopt, std::nullopt};

  const std::size_t idx = static_cast<std::size_t>(leg_index_);
  const leg_info& info = info_[idx];

  // descent legs run two phases: coverage down to the exit node, then a
  // regulated climb back up the same column. the girder is too far below the
  // junction to track from the base, so the climb reuses column following and
  // the leg switch fires on the same count feature as a plain ascent.
  if (info.exit_by == transition::descent_end && !ascending_) {
    bool reached = detect_column_descent_end(line_state_, vert, cfg_.descent_end, cfg_.hough,
                                             cfg_.profile_window, cfg_.filter_near,
                                             cfg_.filter_far, info.exit_above_base);
    if (!reached) return {RoutineKind::column_down, std::nullopt};
    reset_detectors();
    if (idx + 1 >= plan_.legs.size()) {
      ++leg_index_;
      completion_time_ = horiz.timestamp;
      return {std::nullopt, std::nullopt};
    }
    ascending_ = true;
    return {RoutineKind::column_up, std::nullopt};
  }

  bool fired = false;
  std::string trigger;
  if (info.exit_by == transition::girder_count || ascending_) {
    fired = detect_column_to_girder(count_state_, horiz, cfg_.column_to_girder);
    trigger = cfg_.column_to_girder.name;
  } else {
    fired = detect_girder_to_column(line_state_, vert, cfg_.girder_to_column, cfg_.hough,
                                    cfg_.profile_window, cfg_.filter_near, cfg_.filter_far,
                                    traveled_, info.length);
    trigger = cfg_.girder_to_column.name;
  }

  RoutineKind current = ascending_ ? RoutineKind::column_up : plan_.legs[idx].routine;
  if (!fired) return {current, std::nullopt};

  reset_detectors();
  ascending_ = false;
  int from = leg_index_;
  ++leg_index_;
  SwitchEvent ev;
  ev.from_leg = from;
  ev.to_leg = leg_index_;
  ev.trigger = trigger;
  ev.pose = horiz.pose;
  ev.timestamp = horiz.timestamp;
  events_.push_back(ev);
  return {plan_.legs[static_cast<std::size_t>(leg_index_)].routine, ev};
}

void Supervisor::advance_travel(const VelocityCommand& cmd, double dt) {
  if (completed()) return;
  RoutineKind kind = plan_.legs[static_cast<std::size_t>(leg_index_)].routine;
  double component = is_girder_routine(kind) ? cmd.v_body.y() : cmd.v_body.z();
  traveled_ += std::abs(component) * dt;
}

Supervisor make_supervisor(InspectionPlan plan, const BridgeModel& m, SupervisorConfig cfg) {
  return Supervisor(std::move(plan), m, std::move(cfg));
}

}  // namespace girder
