#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "girder/geometry.hpp"
#include "girder/types.hpp"

namespace girder {

struct GtspNode {
  int node_id = 0;
  std::string cluster_id;
  Point3 position{0.0, 0.0, 0.0};
  int partner_id = 0;  // the other node of the cluster, or itself for the depot
};

struct GtspInstance {
  std::vector<GtspNode> nodes;  // sorted by node_id
  std::map<std::string, std::pair<int, int>> clusters;
  std::map<std::pair<int, int>, double> cost;  // directed, present iff feasible
  double distance_scale = 1.0;

  const GtspNode& node(int id) const;
  bool feasible(int from, int to) const { return cost.count({from, to}) > 0; }
  double edge_cost(int from, int to) const;
};

struct Tour {
  std::vector<int> entries;  // one node per cluster, cyclic order
  double total_cost = 0.0;
};

struct PlanLeg {
  std::string surface_id;
  RoutineKind routine = RoutineKind::girder_right;
  int entry = 0;
  int exit = 0;
  Point3 entry_position{0.0, 0.0, 0.0};
  Point3 exit_position{0.0, 0.0, 0.0};
};

struct InspectionPlan {
  std::vector<PlanLeg> legs;
  std::vector<int> expanded_sequence;  // entry, exit, entry, exit, ...
};

struct SolverParams {
  std::uint64_t seed = 1;
  int iterations = 2500;
  std::pair<double, double> removal_fraction_range{0.15, 0.40};
  double initial_temperature = 0.08;
  double cooling_rate = 0.997;
  int restarts = 3;
};

// id of the virtual depot cluster used for open paths
inline const std::string kDepotCluster = "*";

GtspInstance build_instance(const BridgeModel& m);
GtspInstance prune_infeasible(GtspInstance inst, const BridgeModel& m);

// appends a single-node cluster with zero-cost arcs out (to every node, or to
// start_cluster's nodes only) and coverage-cost arcs in, so the cyclic solution
// reads as an open path
GtspInstance add_depot(const GtspInstance& inst, const std::string& start_cluster = "");

Tour solve_heuristic(const GtspInstance& inst, const SolverParams& p);
Tour solve_exact(const GtspInstance& inst);

double tour_cost(const GtspInstance& inst, const std::vector<int>& entries);

// rotation starting at the smallest node id, for order-insensitive comparison
std::vector<int> canonical_entries(const std::vector<int>& entries);

struct AtspInstance {
  std::vector<int> node_ids;  // matrix index -> gtsp node id
  Eigen::MatrixXd cost;       // +inf where no arc exists
  double big_m = 0.0;
};

AtspInstance noon_bean_transform(const GtspInstance& inst);
// order holds matrix indices; picks each cluster's run-entry node
Tour atsp_tour_to_gtsp(const AtspInstance& a, const GtspInstance& inst,
                       const std::vector<int>& order);

InspectionPlan expand_tour(const Tour& t, const GtspInstance& inst, const BridgeModel& m);

std::string serialize_plan(const InspectionPlan& plan, double total_cost);
InspectionPlan parse_plan(const std::string& text);

}  // namespace girder
