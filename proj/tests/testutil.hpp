#pragma once

// shared scene and instance builders for the test binaries

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "girder/geometry.hpp"
#include "girder/gtsp.hpp"

namespace testutil {

inline std::string data_path(const char* name) {
  return std::string(GIRDER_DATA_DIR) + "/" + name;
}

// single girder face in the y=0 plane, long enough to follow for a while
inline girder::BridgeModel wall_model(double x0 = -60.0, double x1 = 60.0, double z0 = 16.8,
                                      double z1 = 20.0) {
  std::ostringstream out;
  double zm = 0.5 * (z0 + z1);
  out << "[[surface]]\n"
      << "id = \"W\"\n"
      << "kind = \"girder\"\n"
      << "vertices = [[" << x0 << ", 0, " << z0 << "], [" << x1 << ", 0, " << z0 << "], [" << x1
      << ", 0, " << z1 << "], [" << x0 << ", 0, " << z1 << "]]\n"
      << "node_a = [" << x0 + 2.0 << ", 0, " << zm << "]\n"
      << "node_b = [" << x1 - 2.0 << ", 0, " << zm << "]\n";
  return girder::load_bridge(out.str());
}

// single column face in the y=0 plane
inline girder::BridgeModel column_model(double half_width = 1.5, double z_top = 16.8) {
  std::ostringstream out;
  out << "[[surface]]\n"
      << "id = \"P\"\n"
      << "kind = \"column\"\n"
      << "vertices = [[" << -half_width << ", 0, 0], [" << half_width << ", 0, 0], [" << half_width
      << ", 0, " << z_top << "], [" << -half_width << ", 0, " << z_top << "]]\n"
      << "node_a = [0, 0, 1.5]\n"
      << "node_b = [0, 0, " << z_top - 1.5 << "]\n";
  return girder::load_bridge(out.str());
}

// two columns joined by one girder span, the smallest plannable bridge
inline girder::BridgeModel mini_model() {
  return girder::load_bridge(R"(
adjacency = [["A", "B"], ["B", "C"]]

[[surface]]
id = "A"
kind = "column"
vertices = [[-1.5, 0.4, 0.0], [1.5, 0.4, 0.0], [1.5, 0.4, 16.8], [-1.5, 0.4, 16.8]]
node_a = [0.0, 0.4, 1.5]
node_b = [0.0, 0.4, 15.3]

[[surface]]
id = "B"
kind = "girder"
vertices = [[-1.5, 0.0, 16.8], [41.5, 0.0, 16.8], [41.5, 0.0, 20.0], [-1.5, 0.0, 20.0]]
node_a = [2.5, 0.0, 18.4]
node_b = [36.5, 0.0, 18.4]

[[surface]]
id = "C"
kind = "column"
vertices = [[38.5, 0.4, 0.0], [41.5, 0.4, 0.0], [41.5, 0.4, 16.8], [38.5, 0.4, 16.8]]
node_a = [40.0, 0.4, 1.5]
node_b = [40.0, 0.4, 15.3]
)");
}

// five girder spans in a row; node ids laid out as 1..5 for the node_a row
// and 6..10 for the node_b row, every cluster pair connected
inline girder::BridgeModel row_model() {
  std::ostringstream out;
  for (int i = 0; i < 5; ++i) {
    double x0 = 12.0 * i;
    double x1 = x0 + 6.0;
    out << "[[surface]]\n"
        << "id = \"" << static_cast<char>('A' + i) << "\"\n"
        << "kind = \"girder\"\n"
        << "vertices = [[" << x0 - 1.0 << ", 0, 0], [" << x1 + 1.0 << ", 0, 0], [" << x1 + 1.0
        << ", 0, 3], [" << x0 - 1.0 << ", 0, 3]]\n"
        << "node_a = [" << x0 << ", 0, 1.5]\n"
        << "node_b = [" << x1 << ", 0, 1.5]\n";
  }
  return girder::load_bridge(out.str());
}

inline girder::GtspInstance row_instance() {
  girder::BridgeModel m = row_model();
  girder::GtspInstance inst;
  for (int i = 0; i < 5; ++i) {
    const auto& s = m.surfaces[static_cast<std::size_t>(i)];
    std::string id(1, static_cast<char>('A' + i));
    inst.nodes.push_back({i + 1, id, s.node_a, i + 6});
    inst.clusters[id] = {i + 1, i + 6};
  }
  for (int i = 0; i < 5; ++i) {
    const auto& s = m.surfaces[static_cast<std::size_t>(i)];
    inst.nodes.push_back({i + 6, std::string(1, static_cast<char>('A' + i)), s.node_b, i + 1});
  }
  for (const auto& u : inst.nodes) {
    const auto& pu = inst.node(u.partner_id);
    double coverage = (u.position - pu.position).norm();
    for (const auto& v : inst.nodes) {
      if (v.cluster_id == u.cluster_id) continue;
      inst.cost[{u.node_id, v.node_id}] = coverage + (pu.position - v.position).norm();
    }
  }
  return inst;
}

// random two-node-per-cluster instance whose cluster adjacency contains a
// random hamiltonian cycle plus extra chords, so a tour always exists
inline girder::GtspInstance random_instance(std::uint32_t seed, int k) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> coord(0.0, 60.0);
  std::bernoulli_distribution chord(0.3);

  girder::GtspInstance inst;
  std::vector<std::string> ids;
  for (int i = 0; i < k; ++i) {
    std::string id(1, static_cast<char>('A' + i));
    ids.push_back(id);
    int a = 2 * i + 1;
    int b = a + 1;
    girder::Point3 pa(coord(rng), coord(rng), coord(rng));
    girder::Point3 pb(coord(rng), coord(rng), coord(rng));
    inst.nodes.push_back({a, id, pa, b});
    inst.nodes.push_back({b, id, pb, a});
    inst.clusters[id] = {a, b};
  }

  std::vector<int> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<bool>> adj(static_cast<std::size_t>(k),
                                     std::vector<bool>(static_cast<std::size_t>(k), false));
  for (int i = 0; i < k; ++i) {
    int a = order[static_cast<std::size_t>(i)];
    int b = order[static_cast<std::size_t>((i + 1) % k)];
    adj[a][b] = adj[b][a] = true;
  }
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      if (chord(rng)) adj[i][j] = adj[j][i] = true;

  for (const auto& u : inst.nodes) {
    const auto& pu = inst.node(u.partner_id);
    double coverage = (u.position - pu.position).norm();
    for (const auto& v : inst.nodes) {
      if (v.cluster_id == u.cluster_id) continue;
      if (!adj[u.cluster_id[0] - 'A'][v.cluster_id[0] - 'A']) continue;
      inst.cost[{u.node_id, v.node_id}] = coverage + (pu.position - v.position).norm();
    }
  }
  return inst;
}

}  // namespace testutil
