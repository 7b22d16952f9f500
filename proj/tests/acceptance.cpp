// end-to-end checks for the planner, perception, control and mission loop;
// prints one verdict line per check and exits nonzero if any fails

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "girder/export.hpp"
#include "girder/geometry.hpp"
#include "girder/gtsp.hpp"
#include "girder/perception.hpp"
#include "girder/sim.hpp"
#include "girder/supervisor.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

using girder::BridgeModel;
using girder::GtspInstance;
using girder::HoughParams;
using girder::InspectionPlan;
using girder::LineEstimate;
using girder::MissionConfig;
using girder::PlanLeg;
using girder::Point3;
using girder::Pose;
using girder::RoutineKind;
using girder::ScanPlane;
using girder::SolverParams;
using girder::Tour;
using girder::TrajectoryLog;
using girder::Vec2;

namespace {

constexpr double kRelTol = 1e-9;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool close_rel(double a, double b) { return std::abs(a - b) <= kRelTol * std::max(1.0, std::abs(b)); }

std::vector<Vec2> line_points(double theta_deg, double rho, double t0, double t1, int n,
                              double sigma = 0.0, unsigned seed = 1) {
  double a = girder::deg2rad(theta_deg);
  Vec2 normal(-std::sin(a), std::cos(a));
  Vec2 dir(std::cos(a), std::sin(a));
  std::mt19937 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  std::vector<Vec2> pts;
  for (int i = 0; i < n; ++i) {
    double t = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n - 1);
    Vec2 p = rho * normal + t * dir;
    if (sigma > 0.0) p += noise(rng) * normal;
    pts.push_back(p);
  }
  return pts;
}

// angular difference on the 180-degree line circle, with the matching rho sign
void line_error(const LineEstimate& got, double theta_deg, double rho, double* dt, double* dr) {
  double diff = std::fmod(std::abs(got.theta - theta_deg), 180.0);
  if (diff > 90.0) {
    diff = 180.0 - diff;
    rho = -rho;
  }
  *dt = diff;
  *dr = std::abs(got.rho - rho);
}

void best_line_error(const std::vector<LineEstimate>& lines, double theta_deg, double rho,
                     double* dt, double* dr) {
  *dt = 1e300;
  *dr = 1e300;
  for (const auto& l : lines) {
    double t = 0.0;
    double r = 0.0;
    line_error(l, theta_deg, rho, &t, &r);
    if (t + 10.0 * r < *dt + 10.0 * *dr) {
      *dt = t;
      *dr = r;
    }
  }
}

PlanLeg make_leg(const std::string& id, RoutineKind k, const Point3& entry, const Point3& exit) {
  PlanLeg l;
  l.surface_id = id;
  l.routine = k;
  l.entry_position = entry;
  l.exit_position = exit;
  return l;
}

std::string fmt(const char* pattern, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), pattern, a, b);
  return buf;
}

int g_failures = 0;

void report(int id, bool ok, const std::string& text) {
  std::printf("%s %d: %s\n", ok ? "PASS" : "FAIL", id, text.c_str());
  if (!ok) ++g_failures;
}

void run_criterion(int id, const std::string& label, bool (*fn)(std::string&)) {
  std::string detail;
  bool ok = false;
  try {
    ok = fn(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  report(id, ok, detail.empty() ? label : label + " (" + detail + ")");
}

// --- 1: full planning pipeline on the five-span bridge ----------------------

bool check_five_span_plan(std::string& detail) {
  auto t0 = std::chrono::steady_clock::now();
  BridgeModel m = girder::load_bridge_file(testutil::data_path("five_span.cfg"));
  GtspInstance inst = girder::add_depot(girder::build_instance(m), "K");
  Tour tour = girder::solve_heuristic(inst, SolverParams{});
  InspectionPlan plan = girder::expand_tour(tour, inst, m);
  double elapsed = seconds_since(t0);

  const std::vector<std::pair<std::string, RoutineKind>> want = {
      {"K", RoutineKind::column_up},   {"J", RoutineKind::girder_left},
      {"I", RoutineKind::column_down}, {"H", RoutineKind::girder_left},
      {"G", RoutineKind::column_down}, {"F", RoutineKind::girder_left},
      {"E", RoutineKind::column_down}, {"D", RoutineKind::girder_left},
      {"C", RoutineKind::column_down}, {"B", RoutineKind::girder_left},
      {"A", RoutineKind::column_down}};
  if (plan.legs.size() != want.size()) {
    detail = "unexpected leg count " + std::to_string(plan.legs.size());
    return false;
  }
  for (std::size_t i = 0; i < want.size(); ++i) {
    if (plan.legs[i].surface_id != want[i].first || plan.legs[i].routine != want[i].second) {
      detail = "leg " + std::to_string(i) + " is " + girder::to_string(plan.legs[i].routine) +
               " " + plan.legs[i].surface_id;
      return false;
    }
  }

  BridgeModel sm = girder::scaled_to_meters(m);
  std::vector<std::array<Point3, 2>> chain;
  for (const auto& [id, kind] : want) {
    (void)kind;
    const auto& s = sm.surface(id);
    chain.push_back({s.node_a, s.node_b});
  }
  oracle::ChainResult best = oracle::chain_cover(chain);
  if (!close_rel(tour.total_cost, best.cost)) {
    detail = fmt("cost %.12f differs from enumerated %.12f", tour.total_cost, best.cost);
    return false;
  }
  if (elapsed >= 5.0) {
    detail = fmt("took %.2f s", elapsed);
    return false;
  }
  detail = fmt("cost %.6f in %.2f s", tour.total_cost, elapsed);
  return true;
}

// --- 2: tour expansion golden ------------------------------------------------

bool check_expansion(std::string& detail) {
  GtspInstance inst = testutil::row_instance();
  Tour t;
  t.entries = {1, 2, 8, 4, 5};
  t.total_cost = girder::tour_cost(inst, t.entries);
  InspectionPlan p = girder::expand_tour(t, inst, testutil::row_model());
  const std::vector<int> want = {1, 6, 2, 7, 8, 3, 4, 9, 5, 10};
  if (p.expanded_sequence != want) {
    std::ostringstream got;
    for (int v : p.expanded_sequence) got << v << " ";
    detail = "expanded to " + got.str();
    return false;
  }
  return true;
}

// --- 3: heuristic against brute force on seeded instances -------------------

bool check_heuristic_quality(std::string& detail) {
  int exact_hits = 0;
  double worst_ratio = 1.0;
  double worst_time = 0.0;
  for (int i = 0; i < 100; ++i) {
    int k = 3 + i % 5;
    GtspInstance inst = testutil::random_instance(1000 + static_cast<std::uint32_t>(i), k);
    oracle::TourResult truth = oracle::brute_force_gtsp(inst);
    if (truth.cost == oracle::kInf) {
      detail = "seed " + std::to_string(1000 + i) + " has no tour";
      return false;
    }

    auto t0 = std::chrono::steady_clock::now();
    Tour h = girder::solve_heuristic(inst, SolverParams{});
    double elapsed = seconds_since(t0);
    worst_time = std::max(worst_time, elapsed);
    if (elapsed >= 1.0) {
      detail = fmt("seed took %.2f s", elapsed);
      return false;
    }

    Tour ex = girder::solve_exact(inst);
    if (!close_rel(ex.total_cost, truth.cost)) {
      detail = fmt("exact %.9f vs enumerated %.9f", ex.total_cost, truth.cost);
      return false;
    }

    double ratio = h.total_cost / truth.cost;
    worst_ratio = std::max(worst_ratio, ratio);
    if (h.total_cost > truth.cost * 1.05 + kRelTol) {
      detail = fmt("seed exceeded 5%%: ratio %.4f", ratio);
      return false;
    }
    if (close_rel(h.total_cost, truth.cost)) ++exact_hits;
  }
  detail = fmt("optimal on %.0f/100, worst ratio %.4f", static_cast<double>(exact_hits),
               worst_ratio) +
           fmt(", slowest %.3f s", worst_time);
  return exact_hits >= 95;
}

// --- 4: reduction to atsp preserves the optimum ------------------------------

bool check_atsp_reduction(std::string& detail) {
  int tested = 0;
  for (int i = 0; i < 100; ++i) {
    int k = 3 + i % 5;
    if (k > 6) continue;
    GtspInstance inst = testutil::random_instance(1000 + static_cast<std::uint32_t>(i), k);
    girder::AtspInstance a = girder::noon_bean_transform(inst);
    double hk = oracle::held_karp_atsp(a.cost);
    double want = girder::solve_exact(inst).total_cost;
    double got = hk - static_cast<double>(k) * a.big_m;
    if (!close_rel(got, want)) {
      detail = fmt("reduced optimum %.9f vs direct %.9f", got, want);
      return false;
    }
    ++tested;
  }
  detail = std::to_string(tested) + " instances";
  return tested > 0;
}

// --- 5: line extraction accuracy ---------------------------------------------

bool check_line_extraction(std::string& detail) {
  HoughParams hp;
  std::mt19937 rng(4242);
  std::uniform_real_distribution<double> theta_dist(0.0, 180.0);
  std::uniform_real_distribution<double> rho_dist(-8.0, 8.0);

  for (int trial = 0; trial < 500; ++trial) {
    double theta = theta_dist(rng);
    double rho = rho_dist(rng);
    auto lines = girder::hough_lines(line_points(theta, rho, -5.0, 5.0, 40), hp);
    if (lines.empty()) {
      detail = fmt("noiseless trial lost the line at theta %.2f rho %.2f", theta, rho);
      return false;
    }
    double dt = 0.0;
    double dr = 0.0;
    best_line_error(lines, theta, rho, &dt, &dr);
    if (dt > 1.0 + kRelTol || dr > hp.rho_bin_width + kRelTol) {
      detail = fmt("noiseless error %.3f deg / %.4f m", dt, dr);
      return false;
    }
  }

  for (int trial = 0; trial < 500; ++trial) {
    double theta = theta_dist(rng);
    double rho = rho_dist(rng);
    auto lines = girder::hough_lines(
        line_points(theta, rho, -5.0, 5.0, 40, 0.02, 9000 + static_cast<unsigned>(trial)), hp);
    if (lines.empty()) {
      detail = fmt("noisy trial lost the line at theta %.2f rho %.2f", theta, rho);
      return false;
    }
    double dt = 0.0;
    double dr = 0.0;
    best_line_error(lines, theta, rho, &dt, &dr);
    if (dt > 2.0 + kRelTol || dr > 2.0 * hp.rho_bin_width + kRelTol) {
      detail = fmt("noisy error %.3f deg / %.4f m", dt, dr);
      return false;
    }
  }

  // a girder-shaped window must keep the mid-extent line out of a trio
  std::vector<Vec2> cloud;
  for (const auto& p : line_points(90.0, -4.5, -2.0, 2.0, 30)) cloud.push_back(p);
  for (const auto& p : line_points(10.0, 3.0, -4.0, 4.0, 40)) cloud.push_back(p);
  for (const auto& p : line_points(90.0, -6.0, 0.0, 1.0, 12)) cloud.push_back(p);
  auto sel = girder::select_surface_line(girder::hough_lines(cloud, hp),
                                         girder::CharacteristicWindow{90.0, 15.0, 3.0, 5.0});
  if (!sel) {
    detail = "window selection returned nothing";
    return false;
  }
  double dt = 0.0;
  double dr = 0.0;
  line_error(*sel, 90.0, -4.5, &dt, &dr);
  if (dt > 1.5 || dr > 0.1) {
    detail = fmt("trio picked theta off by %.2f deg, rho off by %.3f m", dt, dr);
    return false;
  }
  detail = "1000 spot checks and a windowed trio";
  return true;
}

// --- 6: closed-loop setpoint holding ------------------------------------------

bool check_routines_hold(std::string& detail) {
  MissionConfig cfg = girder::load_mission_config("");
  cfg.lidar.range_noise_sigma = 0.02;

  BridgeModel wall = testutil::wall_model();
  Pose gstart{Point3(0.0, -6.0, 17.3), girder::kPi / 2.0};
  auto gr = girder::run_routine(wall, RoutineKind::girder_right, gstart, 40.0, cfg);
  double worst_standoff = 0.0;
  double worst_along = 0.0;
  for (const auto& s : gr.samples) {
    if (s.t < 20.0) continue;
    if (!std::isfinite(s.standoff_err) || !std::isfinite(s.along_err)) {
      detail = fmt("girder estimate dropped out at t %.1f", s.t);
      return false;
    }
    worst_standoff = std::max(worst_standoff, std::abs(s.standoff_err));
    worst_along = std::max(worst_along, std::abs(s.along_err));
  }
  if (worst_standoff > 0.1 || worst_along > 0.1) {
    detail = fmt("girder held %.3f m standoff, %.3f m along", worst_standoff, worst_along);
    return false;
  }

  BridgeModel column = testutil::column_model();
  Pose cstart{Point3(1.0, -5.5, 2.0), girder::kPi / 2.0};
  auto cu = girder::run_routine(column, RoutineKind::column_up, cstart, 26.0, cfg);
  double cworst_standoff = 0.0;
  double cworst_center = 0.0;
  for (const auto& s : cu.samples) {
    if (s.t < 20.0) continue;
    if (!std::isfinite(s.standoff_err) || !std::isfinite(s.along_err)) {
      detail = fmt("column estimate dropped out at t %.1f", s.t);
      return false;
    }
    cworst_standoff = std::max(cworst_standoff, std::abs(s.standoff_err));
    cworst_center = std::max(cworst_center, std::abs(s.along_err));
  }
  if (cworst_standoff > 0.1 || cworst_center > 0.1) {
    detail = fmt("column held %.3f m standoff, %.3f m centering", cworst_standoff, cworst_center);
    return false;
  }
  detail = fmt("girder worst %.3f m, column worst %.3f m", std::max(worst_standoff, worst_along),
               std::max(cworst_standoff, cworst_center));
  return true;
}

// --- 7: ascent handoff timing --------------------------------------------------

bool check_ascent_handoff(std::string& detail) {
  BridgeModel m = girder::scaled_to_meters(
      girder::load_bridge_file(testutil::data_path("five_span.cfg")));
  girder::LidarSpec quiet;
  quiet.range_noise_sigma = 0.0;

  InspectionPlan plan;
  plan.legs.push_back(make_leg("K", RoutineKind::column_up, Point3(200.0, 0.4, 1.5),
                               Point3(200.0, 0.4, 15.3)));
  plan.legs.push_back(make_leg("J", RoutineKind::girder_left, Point3(196.5, 0.0, 18.4),
                               Point3(162.5, 0.0, 18.4)));
  plan.legs.push_back(make_leg("I", RoutineKind::column_down, Point3(160.0, 0.4, 15.3),
                               Point3(160.0, 0.4, 1.5)));
  girder::Supervisor sup = girder::make_supervisor(plan, m, girder::SupervisorConfig{});

  std::vector<int> counts;
  int geometric = -1;
  int fired = -1;
  double ratio_at_jump = 0.0;
  for (int j = 0; j < 30; ++j) {
    double z = 15.5 + 0.125 * j;
    Pose pose{Point3(200.0, -4.1, z), girder::kPi / 2.0};
    double t = 0.5 * j;
    girder::Scan horiz = girder::simulate_scan(m, pose, ScanPlane::horizontal, quiet, 1, t);
    girder::Scan vert = girder::simulate_scan(m, pose, ScanPlane::vertical, quiet, 2, t);

    if (geometric < 0 && !counts.empty()) {
      std::vector<double> window;
      std::size_t lo = counts.size() > 10 ? counts.size() - 10 : 0;
      for (std::size_t q = lo; q < counts.size(); ++q)
        window.push_back(static_cast<double>(counts[q]));
      double med = oracle::median(window);
      double denom = std::max(med, 1.0);
      if (static_cast<double>(horiz.points.size()) >= 2.0 * denom) {
        geometric = j;
        ratio_at_jump = static_cast<double>(horiz.points.size()) / denom;
      }
    }
    if (geometric < 0) counts.push_back(static_cast<int>(horiz.points.size()));

    girder::StepResult res = sup.step(horiz, vert);
    if (res.event) {
      fired = j;
      if (res.event->trigger != "point_count_ratio") {
        detail = "fired on " + res.event->trigger;
        return false;
      }
      break;
    }
  }
  if (geometric < 0) {
    detail = "count never doubled";
    return false;
  }
  if (fired < 0) {
    detail = "supervisor never fired";
    return false;
  }
  if (fired > geometric + 3) {
    detail = fmt("fired %.0f scans after the jump", static_cast<double>(fired - geometric));
    return false;
  }
  detail = fmt("ratio %.2f at the jump, fired %.0f scans later", ratio_at_jump,
               static_cast<double>(fired - geometric));
  return true;
}

// --- 8: full mission with exports ----------------------------------------------

bool check_full_mission(std::string& detail) {
  BridgeModel m = girder::load_bridge_file(testutil::data_path("five_span.cfg"));
  GtspInstance inst = girder::add_depot(girder::build_instance(m), "K");
  Tour tour = girder::solve_heuristic(inst, SolverParams{});
  InspectionPlan plan = girder::expand_tour(tour, inst, m);

  MissionConfig cfg = girder::load_mission_config("");
  TrajectoryLog log = girder::run_mission(m, plan, cfg);
  if (!log.metrics.completed) {
    detail = "did not complete: " + log.metrics.timeout_diagnostic;
    return false;
  }
  if (log.events.size() != plan.legs.size() - 1) {
    detail = "saw " + std::to_string(log.events.size()) + " handoffs";
    return false;
  }
  if (log.metrics.mission_time >= 900.0) {
    detail = fmt("mission took %.1f s", log.metrics.mission_time);
    return false;
  }

  BridgeModel sm = girder::scaled_to_meters(m);
  double worst_approach = 0.0;
  for (std::size_t i = 0; i < log.metrics.legs.size(); ++i) {
    const auto& lm = log.metrics.legs[i];
    const auto& leg = plan.legs[i];
    const auto& surf = sm.surface(leg.surface_id);
    Point3 enter =
        leg.entry_position * m.distance_scale + cfg.standoff_setpoint * surf.plane_normal;
    Point3 exit = leg.exit_position * m.distance_scale + cfg.standoff_setpoint * surf.plane_normal;
    double min_enter = std::numeric_limits<double>::infinity();
    double min_exit = min_enter;
    for (const auto& s : log.samples) {
      if (s.t < lm.start_time || s.t > lm.end_time) continue;
      min_enter = std::min(min_enter, (s.state.position - enter).norm());
      min_exit = std::min(min_exit, (s.state.position - exit).norm());
    }
    worst_approach = std::max({worst_approach, min_enter, min_exit});
    if (min_enter > 1.5 || min_exit > 1.5) {
      detail = "leg " + std::to_string(i) + " (" + leg.surface_id + ")" +
               fmt(" missed a node by %.2f m", std::max(min_enter, min_exit));
      return false;
    }
  }

  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "girder_acceptance_export";
  fs::remove_all(dir);
  girder::export_log(log, dir.string());
  for (const char* name : {"trajectory.csv", "metrics.json", "trajectory.svg"}) {
    fs::path p = dir / name;
    if (!fs::exists(p) || fs::file_size(p) == 0) {
      detail = std::string("missing export ") + name;
      return false;
    }
  }
  fs::remove_all(dir);

  TrajectoryLog again = girder::run_mission(m, plan, cfg);
  if (girder::csv_text(log) != girder::csv_text(again)) {
    detail = "repeat run diverged";
    return false;
  }
  detail = fmt("%.1f s of flight, worst node approach %.2f m", log.metrics.mission_time,
               worst_approach);
  return true;
}

}  // namespace

int main() {
  run_criterion(1, "five-span plan matches the enumerated coverage optimum", check_five_span_plan);
  run_criterion(2, "tour expansion emits the entry/exit node sequence", check_expansion);
  run_criterion(3, "heuristic tracks brute force over seeded instances", check_heuristic_quality);
  run_criterion(4, "atsp reduction preserves the optimum", check_atsp_reduction);
  run_criterion(5, "line extraction stays inside bin accuracy", check_line_extraction);
  run_criterion(6, "closed-loop routines hold their setpoints", check_routines_hold);
  run_criterion(7, "ascent handoff fires within three scans of the count jump",
                check_ascent_handoff);
  run_criterion(8, "full mission completes with repeatable exports", check_full_mission);
  return g_failures == 0 ? 0 : 1;
}
