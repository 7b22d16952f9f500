#pragma once

// reference results computed from first principles. nothing in this header
// calls into the library's solvers, estimators, or controllers; the instance
// structs are read as plain input data.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "girder/control.hpp"
#include "girder/gtsp.hpp"

namespace oracle {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct TourResult {
  double cost = kInf;
  std::vector<int> entries;
};

// best cyclic tour by full enumeration: all cluster orders (first cluster
// pinned, cycles are rotation invariant) times all entry selections
inline TourResult brute_force_gtsp(const girder::GtspInstance& inst) {
  int max_id = 0;
  for (const auto& n : inst.nodes) max_id = std::max(max_id, n.node_id);
  std::vector<std::vector<double>> arc(static_cast<std::size_t>(max_id + 1),
                                       std::vector<double>(static_cast<std::size_t>(max_id + 1), kInf));
  for (const auto& [key, c] : inst.cost)
    arc[static_cast<std::size_t>(key.first)][static_cast<std::size_t>(key.second)] = c;

  std::vector<std::vector<int>> groups;
  for (const auto& [id, pair] : inst.clusters) {
    (void)id;
    if (pair.first == pair.second) groups.push_back({pair.first});
    else groups.push_back({pair.first, pair.second});
  }
  const std::size_t k = groups.size();
  TourResult best;
  if (k < 2) return best;

  std::vector<std::size_t> perm(k - 1);
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i + 1;

  std::vector<int> pick(k, 0);
  std::vector<int> chosen(k, 0);
  do {
    std::vector<std::size_t> order{0};
    order.insert(order.end(), perm.begin(), perm.end());
    std::fill(pick.begin(), pick.end(), 0);
    while (true) {
      double total = 0.0;
      for (std::size_t i = 0; i < k; ++i)
        chosen[i] = groups[order[i]][static_cast<std::size_t>(pick[i])];
      for (std::size_t i = 0; i < k && total < kInf; ++i) {
        double c = arc[static_cast<std::size_t>(chosen[i])]
                      [static_cast<std::size_t>(chosen[(i + 1) % k])];
        total = c == kInf ? kInf : total + c;
      }
      if (total < best.cost) {
        best.cost = total;
        best.entries = chosen;
      }
      std::size_t j = 0;
      while (j < k) {
        if (pick[j] + 1 < static_cast<int>(groups[order[j]].size())) {
          ++pick[j];
          break;
        }
        pick[j] = 0;
        ++j;
      }
      if (j == k) break;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// exact minimum hamiltonian cycle on a dense asymmetric matrix (start node 0)
// by held-karp subset dynamics; +inf marks missing arcs
inline double held_karp_atsp(const Eigen::MatrixXd& c) {
  const int n = static_cast<int>(c.rows());
  if (n < 2) return kInf;
  const std::size_t full = std::size_t{1} << (n - 1);  // subsets of nodes 1..n-1
  std::vector<std::vector<double>> dp(full, std::vector<double>(static_cast<std::size_t>(n), kInf));
  for (int j = 1; j < n; ++j) {
    double a = c(0, j);
    dp[std::size_t{1} << (j - 1)][static_cast<std::size_t>(j)] = a;
  }
  for (std::size_t mask = 1; mask < full; ++mask) {
    for (int j = 1; j < n; ++j) {
      if (!(mask & (std::size_t{1} << (j - 1)))) continue;
      double base = dp[mask][static_cast<std::size_t>(j)];
      if (base == kInf) continue;
      for (int m = 1; m < n; ++m) {
        if (mask & (std::size_t{1} << (m - 1))) continue;
        double step = c(j, m);
        if (step == kInf) continue;
        std::size_t next = mask | (std::size_t{1} << (m - 1));
        double cand = base + step;
        if (cand < dp[next][static_cast<std::size_t>(m)]) dp[next][static_cast<std::size_t>(m)] = cand;
      }
    }
  }
  double best = kInf;
  for (int j = 1; j < n; ++j) {
    double tail = dp[full - 1][static_cast<std::size_t>(j)];
    double close = c(j, 0);
    if (tail == kInf || close == kInf) continue;
    best = std::min(best, tail + close);
  }
  return best;
}

// minimum open-path coverage cost over a fixed cluster order: every cluster
// contributes its own coverage distance, consecutive clusters a hop from the
// previous exit to the next entry; entry choices enumerated exhaustively
struct ChainResult {
  double cost = kInf;
  std::vector<int> picks;  // 0 = first listed node entered first
};

inline ChainResult chain_cover(const std::vector<std::array<girder::Point3, 2>>& nodes) {
  const std::size_t k = nodes.size();
  ChainResult best;
  if (k == 0) return best;
  double coverage = 0.0;
  for (const auto& pair : nodes) coverage += (pair[0] - pair[1]).norm();
  for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
    double hops = 0.0;
    for (std::size_t i = 0; i + 1 < k; ++i) {
      const auto& exit = nodes[i][(mask >> i & 1u) ^ 1u];
      const auto& entry = nodes[i + 1][(mask >> (i + 1)) & 1u];
      hops += (exit - entry).norm();
    }
    if (coverage + hops < best.cost) {
      best.cost = coverage + hops;
      best.picks.assign(k, 0);
      for (std::size_t i = 0; i < k; ++i) best.picks[i] = (mask >> i) & 1u;
    }
  }
  return best;
}

// distance from (x, y) to the line -x sin(theta) + y cos(theta) = rho
inline double point_line_distance(double x, double y, double theta_deg, double rho) {
  double a = theta_deg * girder::kPi / 180.0;
  return std::abs(-x * std::sin(a) + y * std::cos(a) - rho);
}

// ray against a planar quad, split into two triangles with barycentric
// inside tests; returns the hit distance or -1
inline double ray_quad_hit(const girder::Point3& origin, const girder::Vec3& dir,
                           const std::array<girder::Point3, 4>& v) {
  auto tri_hit = [&](const girder::Point3& a, const girder::Point3& b,
                     const girder::Point3& c) -> double {
    girder::Vec3 n = (b - a).cross(c - a);
    double denom = dir.dot(n);
    if (std::abs(denom) < 1e-12) return -1.0;
    double t = (a - origin).dot(n) / denom;
    if (t < 0.0) return -1.0;
    girder::Point3 p = origin + t * dir;
    double n2 = n.dot(n);
    double beta = (p - a).cross(c - a).dot(n) / n2;
    double gamma = (b - a).cross(p - a).dot(n) / n2;
    if (beta < -1e-9 || gamma < -1e-9 || beta + gamma > 1.0 + 1e-9) return -1.0;
    return t;
  };
  double h1 = tri_hit(v[0], v[1], v[2]);
  double h2 = tri_hit(v[0], v[2], v[3]);
  if (h1 < 0.0) return h2;
  if (h2 < 0.0) return h1;
  return std::min(h1, h2);
}

// textbook pid trace: clamped integral, derivative on the error, first
// derivative sample suppressed, output saturated symmetrically
inline std::vector<double> pid_reference(const girder::PidGains& g,
                                         const std::vector<double>& errors, double dt) {
  std::vector<double> out;
  double integral = 0.0;
  double prev = 0.0;
  bool first = true;
  for (double e : errors) {
    integral += e * dt;
    if (g.ki > 0.0) {
      double cap = g.integral_limit / g.ki;
      integral = std::min(cap, std::max(-cap, integral));
    }
    double d = first ? 0.0 : (e - prev) / dt;
    first = false;
    prev = e;
    double u = g.kp * e + g.ki * integral + g.kd * d;
    out.push_back(std::min(g.output_limit, std::max(-g.output_limit, u)));
  }
  return out;
}

inline double rms(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double sum = 0.0;
  for (double x : xs) sum += x * x;
  return std::sqrt(sum / static_cast<double>(xs.size()));
}

inline double median(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  std::size_t n = xs.size();
  if (n % 2 == 1) return xs[n / 2];
  return 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace oracle
