#include "girder/gtsp.hpp"

#include "girder/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>
#include <random>
#include <set>

namespace girder {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
constexpr double tie_rel = 1e-12;

double u01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * (1.0 / 9007199254740992.0);
}

std::size_t randint(std::mt19937_64& g, std::size_t n) { return g() % n; }

bool near_equal(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b)) return false;
  return std::abs(a - b) <= tie_rel * std::max({1.0, std::abs(a), std::abs(b)});
}

std::string join_ids(const std::set<std::string>& ids) {
  std::string out;
  for (const auto& id : ids) {
    if (!out.empty()) out += ", ";
    out += id;
  }
  return out;
}

}  // namespace

const GtspNode& GtspInstance::node(int id) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), id,
                             [](const GtspNode& n, int v) { return n.node_id < v; });
  if (it == nodes.end() || it->node_id != id)
    throw Error("no gtsp node with id " + std::to_string(id));
  return *it;
}

double GtspInstance::edge_cost(int from, int to) const {
  auto it = cost.find({from, to});
  if (it == cost.end())
    throw Error("no feasible arc " + std::to_string(from) + " -> " + std::to_string(to));
  return it->second;
}

GtspInstance build_instance(const BridgeModel& m) {
  if (m.surfaces.size() < 2)
    throw Error("instance too small: planning needs at least 2 surfaces");

  GtspInstance inst;
  inst.distance_scale = m.distance_scale;
  for (std::size_t i = 0; i < m.surfaces.size(); ++i) {
    const auto& s = m.surfaces[i];
    int a = static_cast<int>(2 * i) + 1;
    int b = a + 1;
    inst.nodes.push_back({a, s.id, s.node_a, b});
    inst.nodes.push_back({b, s.id, s.node_b, a});
    inst.clusters[s.id] = {a, b};
  }
  for (const auto& u : inst.nodes) {
    const auto& pu = inst.node(u.partner_id);
    double coverage = node_distance(m, u.position, pu.position);
    for (const auto& v : inst.nodes) {
      if (v.cluster_id == u.cluster_id) continue;
      inst.cost[{u.node_id, v.node_id}] = coverage + node_distance(m, pu.position, v.position);
    }
  }
  return prune_infeasible(std::move(inst), m);
}

GtspInstance prune_infeasible(GtspInstance inst, const BridgeModel& m) {
  for (auto it = inst.cost.begin(); it != inst.cost.end();) {
    const auto& cu = inst.node(it->first.first).cluster_id;
    const auto& cv = inst.node(it->first.second).cluster_id;
    bool keep = cu != cv && m.adjacent(cu, cv);
    it = keep ? std::next(it) : inst.cost.erase(it);
  }

  // every cluster must stay reachable along feasible arcs
  std::set<std::string> unreached;
  for (const auto& [id, pair] : inst.clusters) {
    (void)pair;
    unreached.insert(id);
  }
  std::queue<std::string> frontier;
  frontier.push(*unreached.begin());
  unreached.erase(unreached.begin());
  while (!frontier.empty()) {
    std::string cur = frontier.front();
    frontier.pop();
    for (const auto& [arc, c] : inst.cost) {
      (void)c;
      const auto& cu = inst.node(arc.first).cluster_id;
      const auto& cv = inst.node(arc.second).cluster_id;
      std::string other;
      if (cu == cur) other = cv;
      else if (cv == cur) other = cu;
      else continue;
      auto it = unreached.find(other);
      if (it != unreached.end()) {
        unreached.erase(it);
        frontier.push(other);
      }
    }
  }
  if (!unreached.empty())
    throw Error("infeasible coverage: cluster(s) " + join_ids(unreached) +
                " cannot be reached after pruning");
  return inst;
}

GtspInstance add_depot(const GtspInstance& inst, const std::string& start_cluster) {
  if (!start_cluster.empty() && inst.clusters.count(start_cluster) == 0)
    throw Error("start cluster '" + start_cluster + "' does not exist");
  GtspInstance out = inst;
  int depot = 0;
  for (const auto& n : out.nodes) depot = std::max(depot, n.node_id);
  ++depot;
  out.nodes.push_back({depot, kDepotCluster, Point3::Zero(), depot});
  out.clusters[kDepotCluster] = {depot, depot};
  for (const auto& u : inst.nodes) {
    if (start_cluster.empty() || u.cluster_id == start_cluster)
      out.cost[{depot, u.node_id}] = 0.0;
    const auto& pu = inst.node(u.partner_id);
    out.cost[{u.node_id, depot}] =
        (u.position - pu.position).norm() * inst.distance_scale;
  }
  return out;
}

double tour_cost(const GtspInstance& inst, const std::vector<int>& entries) {
  if (entries.size() < 2) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    auto it = inst.cost.find({entries[i], entries[(i + 1) % entries.size()]});
    if (it == inst.cost.end()) return inf;
    total += it->second;
  }
  return total;
}

std::vector<int> canonical_entries(const std::vector<int>& entries) {
  if (entries.empty()) return entries;
  auto min_it = std::min_element(entries.begin(), entries.end());
  std::vector<int> out(entries.size());
  std::rotate_copy(entries.begin(), min_it, entries.end(), out.begin());
  return out;
}

Tour solve_exact(const GtspInstance& inst) {
  const std::size_t k = inst.clusters.size();
  if (k > 9)
    throw Error("instance too large for exact solve: " + std::to_string(k) + " clusters (limit 9)");
  if (k == 0) throw Error("instance too small: no clusters");

  // nodes of the lexicographically first cluster open the sequence
  const auto& first_cluster = inst.clusters.begin()->first;
  if (k == 1) {
    int id = std::min(inst.clusters.begin()->second.first, inst.clusters.begin()->second.second);
    return {{id}, 0.0};
  }

  std::vector<int> sorted_ids;
  for (const auto& n : inst.nodes) sorted_ids.push_back(n.node_id);
  std::sort(sorted_ids.begin(), sorted_ids.end());

  std::vector<int> seq;
  std::set<std::string> visited;
  std::vector<int> best_seq;
  double best = inf;

  auto dfs = [&](auto&& self, double partial) -> void {
    if (partial >= best) return;
    if (seq.size() == k) {
      auto it = inst.cost.find({seq.back(), seq.front()});
      if (it == inst.cost.end()) return;
      double total = partial + it->second;
      if (total < best && !near_equal(total, best)) {
        best = total;
        best_seq = seq;
      }
      return;
    }
    for (int v : sorted_ids) {
      const auto& n = inst.node(v);
      if (visited.count(n.cluster_id) > 0) continue;
      if (!seq.empty()) {
        auto it = inst.cost.find({seq.back(), v});
        if (it == inst.cost.end()) continue;
        seq.push_back(v);
        visited.insert(n.cluster_id);
        self(self, partial + it->second);
        visited.erase(n.cluster_id);
        seq.pop_back();
      } else if (n.cluster_id == first_cluster) {
        seq.push_back(v);
        visited.insert(n.cluster_id);
        self(self, 0.0);
        visited.erase(n.cluster_id);
        seq.pop_back();
      }
    }
  };
  dfs(dfs, 0.0);

  if (best_seq.empty()) throw Error("infeasible coverage: no feasible tour exists");
  return {best_seq, best};
}

namespace {

struct soft_costs {
  const GtspInstance& inst;
  double big;

  double operator()(int u, int v) const {
    auto it = inst.cost.find({u, v});
    return it == inst.cost.end() ? big : it->second;
  }
};

double soft_tour_cost(const soft_costs& soft, const std::vector<int>& entries) {
  double total = 0.0;
  for (std::size_t i = 0; i < entries.size(); ++i)
    total += soft(entries[i], entries[(i + 1) % entries.size()]);
  return total;
}

// cheapest position and node for one cluster, soft-penalized
struct insertion {
  double delta = inf;
  int node = 0;
  std::size_t pos = 0;
};

insertion best_insertion(const soft_costs& soft, const std::vector<int>& entries,
                         std::pair<int, int> cluster_nodes) {
  insertion best;
  for (int v : {std::min(cluster_nodes.first, cluster_nodes.second),
                std::max(cluster_nodes.first, cluster_nodes.second)}) {
    if (entries.empty()) {
      if (0.0 < best.delta) best = {0.0, v, 0};
      continue;
    }
    if (entries.size() == 1) {
      double d = soft(entries[0], v) + soft(v, entries[0]);
      if (d < best.delta) best = {d, v, 1};
      continue;
    }
    for (std::size_t p = 0; p < entries.size(); ++p) {
      int a = entries[p];
      int b = entries[(p + 1) % entries.size()];
      double d = soft(a, v) + soft(v, b) - soft(a, b);
      if (d < best.delta) best = {d, v, p + 1};
    }
    if (cluster_nodes.first == cluster_nodes.second) break;  // depot
  }
  return best;
}

// optimal entry node per cluster for a fixed cluster order, by a two-state
// sweep over the cycle with both choices of the opening node
std::vector<int> reoptimize_entries(const GtspInstance& inst, const soft_costs& soft,
                                    const std::vector<int>& entries) {
  const std::size_t n = entries.size();
  if (n < 2) return entries;

  std::vector<std::array<int, 2>> choices(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& pair = inst.clusters.at(inst.node(entries[i]).cluster_id);
    choices[i] = {std::min(pair.first, pair.second), std::max(pair.first, pair.second)};
  }

  double best_total = inf;
  std::vector<int> best_seq = entries;
  std::vector<std::array<int, 2>> parent(n, {0, 0});
  for (int s = 0; s < 2; ++s) {
    int start = choices[0][static_cast<std::size_t>(s)];
    std::array<double, 2> dp{soft(start, choices[1][0]), soft(start, choices[1][1])};
    for (std::size_t i = 2; i < n; ++i) {
      std::array<double, 2> next{inf, inf};
      for (int j = 0; j < 2; ++j) {
        for (int pj = 0; pj < 2; ++pj) {
          double cand = dp[static_cast<std::size_t>(pj)] +
                        soft(choices[i - 1][static_cast<std::size_t>(pj)],
                             choices[i][static_cast<std::size_t>(j)]);
          if (cand < next[static_cast<std::size_t>(j)]) {
            next[static_cast<std::size_t>(j)] = cand;
            parent[i][static_cast<std::size_t>(j)] = pj;
          }
        }
      }
      dp = next;
    }
    for (int j = 0; j < 2; ++j) {
      double total = dp[static_cast<std::size_t>(j)] +
                     soft(choices[n - 1][static_cast<std::size_t>(j)], start);
      if (total < best_total) {
        best_total = total;
        std::vector<int> pick(n, 0);
        pick[0] = s;
        pick[n - 1] = j;
        for (std::size_t i = n - 1; i >= 2; --i)
          pick[i - 1] = parent[i][static_cast<std::size_t>(pick[i])];
        for (std::size_t i = 0; i < n; ++i)
          best_seq[i] = choices[i][static_cast<std::size_t>(pick[i])];
      }
    }
  }
  return best_seq;
}

std::vector<int> construct_nearest_insertion(const GtspInstance& inst, const soft_costs& soft) {
  std::vector<int> entries;
  std::set<std::string> remaining;
  for (const auto& [id, pair] : inst.clusters) {
    (void)pair;
    remaining.insert(id);
  }
  const auto& first = inst.clusters.begin()->second;
  entries.push_back(std::min(first.first, first.second));
  remaining.erase(inst.clusters.begin()->first);

  while (!remaining.empty()) {
    std::string pick;
    insertion pick_ins;
    for (const auto& id : remaining) {
      insertion ins = best_insertion(soft, entries, inst.clusters.at(id));
      if (ins.delta < pick_ins.delta ||
          (ins.delta == pick_ins.delta && ins.node < pick_ins.node)) {
        pick = id;
        pick_ins = ins;
      }
    }
    entries.insert(entries.begin() + static_cast<long>(pick_ins.pos), pick_ins.node);
    remaining.erase(pick);
  }
  return entries;
}

}  // namespace

Tour solve_heuristic(const GtspInstance& inst, const SolverParams& p) {
  if (p.iterations < 1 || p.restarts < 1) throw Error("solver params: iterations and restarts must be >= 1");
  const auto [frac_lo, frac_hi] = p.removal_fraction_range;
  if (!(frac_lo > 0.0 && frac_lo <= frac_hi && frac_hi < 1.0))
    throw Error("solver params: removal fractions must satisfy 0 < low <= high < 1");
  if (!(p.cooling_rate > 0.0 && p.cooling_rate < 1.0))
    throw Error("solver params: cooling rate must be in (0, 1)");

  double max_cost = 0.0;
  for (const auto& [arc, c] : inst.cost) {
    (void)arc;
    max_cost = std::max(max_cost, c);
  }
  soft_costs soft{inst, 1e6 * (1.0 + max_cost)};

  const std::size_t n = inst.clusters.size();
  std::vector<int> construction =
      reoptimize_entries(inst, soft, construct_nearest_insertion(inst, soft));
  const double construction_cost = soft_tour_cost(soft, construction);

  std::vector<int> best_entries = construction;
  double best_cost = construction_cost;

  for (int restart = 0; restart < p.restarts; ++restart) {
    std::mt19937_64 rng(p.seed + 0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(restart));
    std::vector<int> cur = construction;
    double cur_cost = construction_cost;
    if (restart > 0) {
      // later restarts search from a randomized tour so they are not
      // confined to the construction's basin
      std::vector<std::string> order;
      for (const auto& [id, pair] : inst.clusters) {
        (void)pair;
        order.push_back(id);
      }
      std::shuffle(order.begin(), order.end(), rng);
      cur.clear();
      for (const auto& id : order) {
        const auto& pair = inst.clusters.at(id);
        cur.push_back(u01(rng) < 0.5 ? std::min(pair.first, pair.second)
                                     : std::max(pair.first, pair.second));
      }
      cur = reoptimize_entries(inst, soft, cur);
      cur_cost = soft_tour_cost(soft, cur);
    }
    double temperature = p.initial_temperature * construction_cost / static_cast<double>(n);

    for (int iter = 0; iter < p.iterations; ++iter) {
      double frac = frac_lo + (frac_hi - frac_lo) * u01(rng);
      std::size_t k = static_cast<std::size_t>(std::lround(frac * static_cast<double>(n)));
      k = std::clamp<std::size_t>(k, 1, n - 1);

      std::set<std::size_t> removed_pos;
      if (u01(rng) < 0.5) {
        while (removed_pos.size() < k) removed_pos.insert(randint(rng, n));
      } else {
        std::size_t start = randint(rng, n);
        for (std::size_t j = 0; j < k; ++j) removed_pos.insert((start + j) % n);
      }

      std::vector<int> trial;
      std::set<std::string> removed_clusters;
      for (std::size_t i = 0; i < cur.size(); ++i) {
        if (removed_pos.count(i) > 0)
          removed_clusters.insert(inst.node(cur[i]).cluster_id);
        else
          trial.push_back(cur[i]);
      }

      while (!removed_clusters.empty()) {
        std::string pick;
        insertion pick_ins;
        for (const auto& id : removed_clusters) {
          insertion ins = best_insertion(soft, trial, inst.clusters.at(id));
          if (ins.delta < pick_ins.delta ||
              (ins.delta == pick_ins.delta && ins.node < pick_ins.node)) {
            pick = id;
            pick_ins = ins;
          }
        }
        trial.insert(trial.begin() + static_cast<long>(pick_ins.pos), pick_ins.node);
        removed_clusters.erase(pick);
      }

      trial = reoptimize_entries(inst, soft, trial);
      double trial_cost = soft_tour_cost(soft, trial);
      bool accept = trial_cost < cur_cost;
      if (!accept && temperature > 1e-300)
        accept = u01(rng) < std::exp(-(trial_cost - cur_cost) / temperature);
      if (accept) {
        cur = std::move(trial);
        cur_cost = trial_cost;
        if (cur_cost < best_cost && !near_equal(cur_cost, best_cost)) {
          best_entries = cur;
          best_cost = cur_cost;
        } else if (near_equal(cur_cost, best_cost) &&
                   canonical_entries(cur) < canonical_entries(best_entries)) {
          best_entries = cur;
        }
      }
      temperature *= p.cooling_rate;
    }
  }

  double exact = tour_cost(inst, best_entries);
  if (!std::isfinite(exact))
    throw Error("infeasible coverage: search could not produce a feasible tour");
  return {best_entries, exact};
}

AtspInstance noon_bean_transform(const GtspInstance& inst) {
  AtspInstance a;
  for (const auto& n : inst.nodes) a.node_ids.push_back(n.node_id);
  std::sort(a.node_ids.begin(), a.node_ids.end());
  std::map<int, int> index;
  for (std::size_t i = 0; i < a.node_ids.size(); ++i) index[a.node_ids[i]] = static_cast<int>(i);

  double sum = 0.0;
  for (const auto& [arc, c] : inst.cost) {
    (void)arc;
    sum += c;
  }
  a.big_m = sum + 1.0;

  const auto n = static_cast<Eigen::Index>(a.node_ids.size());
  a.cost = Eigen::MatrixXd::Constant(n, n, inf);

  // zero-cost cycle over each cluster's nodes in ascending id order
  for (const auto& [id, pair] : inst.clusters) {
    (void)id;
    if (pair.first == pair.second) continue;
    int lo = std::min(pair.first, pair.second);
    int hi = std::max(pair.first, pair.second);
    a.cost(index[lo], index[hi]) = 0.0;
    a.cost(index[hi], index[lo]) = 0.0;
  }

  // leaving arcs shift back to the cycle predecessor and pick up the offset
  for (const auto& [arc, c] : inst.cost) {
    int prev = inst.node(arc.first).partner_id;  // cycle of two, or self for the depot
    a.cost(index[prev], index[arc.second]) = c + a.big_m;
  }
  return a;
}

Tour atsp_tour_to_gtsp(const AtspInstance& a, const GtspInstance& inst,
                       const std::vector<int>& order) {
  const std::size_t n = order.size();
  if (n != a.node_ids.size()) throw Error("atsp tour length does not match instance");
  auto cluster_of = [&](std::size_t i) {
    return inst.node(a.node_ids[static_cast<std::size_t>(order[i])]).cluster_id;
  };
  std::size_t start = 0;
  while (start < n && cluster_of(start) == cluster_of((start + n - 1) % n)) ++start;
  if (start == n) {
    // single cluster
    int id = a.node_ids[static_cast<std::size_t>(order[0])];
    return {{id}, 0.0};
  }
  std::vector<int> entries;
  std::string prev;
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t i = (start + j) % n;
    std::string c = cluster_of(i);
    if (c != prev) {
      entries.push_back(a.node_ids[static_cast<std::size_t>(order[i])]);
      prev = c;
    }
  }
  return {entries, tour_cost(inst, entries)};
}

InspectionPlan expand_tour(const Tour& t, const GtspInstance& inst, const BridgeModel& m) {
  std::vector<int> entries = t.entries;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (inst.node(entries[i]).cluster_id == kDepotCluster) {
      std::rotate(entries.begin(), entries.begin() + static_cast<long>(i), entries.end());
      entries.erase(entries.begin());
      break;
    }
  }

  InspectionPlan plan;
  for (int u : entries) {
    const auto& node = inst.node(u);
    const auto& partner = inst.node(node.partner_id);
    const auto& surface = m.surface(node.cluster_id);
    PlanLeg leg;
    leg.surface_id = node.cluster_id;
    leg.entry = u;
    leg.exit = partner.node_id;
    leg.entry_position = node.position;
    leg.exit_position = partner.position;
    leg.routine = routine_for_leg(surface, node.position, partner.position);
    plan.legs.push_back(leg);
    plan.expanded_sequence.push_back(u);
    plan.expanded_sequence.push_back(partner.node_id);
  }
  return plan;
}

std::string serialize_plan(const InspectionPlan& plan, double total_cost) {
  char buf[128];
  std::string out = "# inspection plan\n";
  std::snprintf(buf, sizeof(buf), "total_cost = %.17g\n", total_cost);
  out += buf;
  for (const auto& leg : plan.legs) {
    out += "\n[[leg]]\n";
    out += "surface = \"" + leg.surface_id + "\"\n";
    out += "routine = \"" + to_string(leg.routine) + "\"\n";
    std::snprintf(buf, sizeof(buf), "entry = %d\nexit = %d\n", leg.entry, leg.exit);
    out += buf;
    const auto& e = leg.entry_position;
    const auto& x = leg.exit_position;
    std::snprintf(buf, sizeof(buf), "entry_position = [%.17g, %.17g, %.17g]\n", e.x(), e.y(), e.z());
    out += buf;
    std::snprintf(buf, sizeof(buf), "exit_position = [%.17g, %.17g, %.17g]\n", x.x(), x.y(), x.z());
    out += buf;
  }
  return out;
}

InspectionPlan parse_plan(const std::string& text) {
  ConfigValue root = parse_config(text);
  InspectionPlan plan;
  const ConfigValue* legs = root.find("leg");
  if (legs == nullptr) return plan;
  auto point = [](const ConfigValue& v) {
    const auto& arr = v.as_array();
    if (arr.size() != 3) throw ConfigError("positions need 3 components", v.line);
    return Point3{arr[0].as_number(), arr[1].as_number(), arr[2].as_number()};
  };
  for (const auto& lt : legs->as_array()) {
    PlanLeg leg;
    leg.surface_id = lt.at("surface").as_string();
    leg.routine = routine_kind_from_string(lt.at("routine").as_string());
    leg.entry = static_cast<int>(lt.at("entry").as_number());
    leg.exit = static_cast<int>(lt.at("exit").as_number());
    leg.entry_position = point(lt.at("entry_position"));
    leg.exit_position = point(lt.at("exit_position"));
    plan.legs.push_back(leg);
    plan.expanded_sequence.push_back(leg.entry);
    plan.expanded_sequence.push_back(leg.exit);
  }
  return plan;
}

}  // namespace girder
