#include "girder/geometry.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "girder/config.hpp"

namespace girder {

namespace {

constexpr double coplanar_tol = 1e-6;      // meters
constexpr double node_plane_tol = 0.5;     // meters
constexpr double adjacency_gap_max = 1.0;  // meters

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

bool same_point(const Point3& a, const Point3& b) {
  return a.x() == b.x() && a.y() == b.y() && a.z() == b.z();
}

Point3 parse_point(const ConfigValue& v, const std::string& field) {
  const auto& arr = v.as_array();
  if (arr.size() != 3)
    throw ConfigError("field '" + field + "' must have 3 components", v.line);
  return {arr[0].as_number(), arr[1].as_number(), arr[2].as_number()};
}

void check_known_fields(const ConfigValue& table, const std::set<std::string>& known,
                        const std::string& where) {
  for (const auto& [key, val] : table.entries)
    if (known.count(key) == 0)
      throw ConfigError("unknown field '" + key + "' in " + where, val.line);
}

Vec3 face_normal(const std::array<Point3, 4>& v, const std::string& id) {
  Vec3 n = (v[1] - v[0]).cross(v[3] - v[0]);
  if (n.norm() < 1e-12)
    throw ValidationError("surface " + id + ": degenerate vertices, no plane normal");
  return n.normalized();
}

void validate(const BridgeModel& m) {
  const double s = m.distance_scale;
  std::set<std::string> ids;
  for (const auto& sp : m.surfaces) {
    if (sp.id.size() != 1 || std::isalpha(static_cast<unsigned char>(sp.id[0])) == 0)
      throw ValidationError("surface id '" + sp.id + "' is not a single letter");
    if (!ids.insert(sp.id).second)
      throw ValidationError("duplicate surface id '" + sp.id + "'");

    for (const auto& v : sp.vertices) {
      double d = std::abs((v - sp.vertices[0]).dot(sp.plane_normal)) * s;
      if (d > coplanar_tol)
        throw ValidationError("surface " + sp.id + ": vertices not coplanar (off by " + fmt(d) + " m)");
    }
    if (same_point(sp.node_a, sp.node_b))
      throw ValidationError("surface " + sp.id + ": node_a equals node_b");
    for (const Point3* n : {&sp.node_a, &sp.node_b}) {
      double d = std::abs((*n - sp.vertices[0]).dot(sp.plane_normal)) * s;
      if (d > node_plane_tol)
        throw ValidationError("surface " + sp.id + ": node lies " + fmt(d) + " m off the polygon plane");
    }
    Vec3 delta = (sp.node_b - sp.node_a).cwiseAbs();
    if (sp.kind == SurfaceKind::column) {
      if (delta.z() <= delta.x() || delta.z() <= delta.y())
        throw ValidationError("surface " + sp.id + ": column nodes must differ primarily along z");
    } else {
      if (delta.x() <= delta.y() || delta.x() <= delta.z())
        throw ValidationError("surface " + sp.id + ": nodes must differ primarily along the longitudinal axis");
    }
  }

  for (const auto& [a, b] : m.adjacency) {
    if (a == b) throw ValidationError("adjacency pair (" + a + ", " + a + ") is self referencing");
    const SurfacePolygon* pa = m.find_surface(a);
    const SurfacePolygon* pb = m.find_surface(b);
    if (pa == nullptr || pb == nullptr)
      throw ValidationError("adjacency pair (" + a + ", " + b + ") names an unknown surface");
    double gap = 1e300;
    for (const auto& va : pa->vertices)
      for (const auto& vb : pb->vertices) gap = std::min(gap, (va - vb).norm() * s);
    if (gap >= adjacency_gap_max)
      throw ValidationError("adjacency pair (" + a + ", " + b + "): closest vertices are " + fmt(gap) +
                            " m apart, surfaces are not adjacent");
  }
}

}  // namespace

const SurfacePolygon* BridgeModel::find_surface(const std::string& id) const {
  for (const auto& s : surfaces)
    if (s.id == id) return &s;
  return nullptr;
}

const SurfacePolygon& BridgeModel::surface(const std::string& id) const {
  const SurfacePolygon* s = find_surface(id);
  if (s == nullptr) throw Error("no surface with id '" + id + "'");
  return *s;
}

bool BridgeModel::adjacent(const std::string& a, const std::string& b) const {
  auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
  return std::binary_search(adjacency.begin(), adjacency.end(), key);
}

bool operator==(const SurfacePolygon& a, const SurfacePolygon& b) {
  for (int i = 0; i < 4; ++i)
    if (!same_point(a.vertices[i], b.vertices[i])) return false;
  return a.id == b.id && a.kind == b.kind && same_point(a.node_a, b.node_a) &&
         same_point(a.node_b, b.node_b) && same_point(a.plane_normal, b.plane_normal);
}

bool operator==(const BridgeModel& a, const BridgeModel& b) {
  return a.surfaces == b.surfaces && a.adjacency == b.adjacency &&
         a.distance_scale == b.distance_scale;
}

BridgeModel load_bridge(const std::string& config_text) {
  ConfigValue root = parse_config(config_text);
  check_known_fields(root, {"distance_scale", "surface", "adjacency"}, "bridge config");

  BridgeModel m;
  m.distance_scale = root.number_or("distance_scale", 1.0);
  if (m.distance_scale <= 0.0)
    throw ValidationError("distance_scale must be positive");

  const ConfigValue* surfaces = root.find("surface");
  if (surfaces == nullptr) throw ConfigError("bridge config has no [[surface]] entries", root.line);
  for (const auto& st : surfaces->as_array()) {
    check_known_fields(st, {"id", "kind", "vertices", "node_a", "node_b"}, "surface");
    SurfacePolygon sp;
    sp.id = st.at("id").as_string();
    sp.kind = surface_kind_from_string(st.at("kind").as_string());
    const auto& verts = st.at("vertices").as_array();
    if (verts.size() != 4)
      throw ConfigError("surface '" + sp.id + "' needs exactly 4 vertices", st.at("vertices").line);
    for (int i = 0; i < 4; ++i) sp.vertices[i] = parse_point(verts[i], "vertices");
    sp.node_a = parse_point(st.at("node_a"), "node_a");
    sp.node_b = parse_point(st.at("node_b"), "node_b");
    sp.plane_normal = face_normal(sp.vertices, sp.id);
    m.surfaces.push_back(std::move(sp));
  }

  if (const ConfigValue* adj = root.find("adjacency")) {
    for (const auto& pair : adj->as_array()) {
      const auto& p = pair.as_array();
      if (p.size() != 2) throw ConfigError("adjacency pairs must have 2 ids", pair.line);
      std::string a = p[0].as_string();
      std::string b = p[1].as_string();
      if (b < a) std::swap(a, b);
      m.adjacency.emplace_back(std::move(a), std::move(b));
    }
    std::sort(m.adjacency.begin(), m.adjacency.end());
    m.adjacency.erase(std::unique(m.adjacency.begin(), m.adjacency.end()), m.adjacency.end());
  }

  validate(m);
  return m;
}

BridgeModel load_bridge_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open bridge config: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_bridge(buf.str());
}

std::string serialize_bridge(const BridgeModel& m) {
  std::string out;
  out += "distance_scale = " + fmt(m.distance_scale) + "\n";
  out += "adjacency = [";
  for (std::size_t i = 0; i < m.adjacency.size(); ++i) {
    if (i > 0) out += ", ";
    out += "[\"" + m.adjacency[i].first + "\", \"" + m.adjacency[i].second + "\"]";
  }
  out += "]\n";
  for (const auto& s : m.surfaces) {
    out += "\n[[surface]]\n";
    out += "id = \"" + s.id + "\"\n";
    out += "kind = \"" + to_string(s.kind) + "\"\n";
    out += "vertices = [";
    for (int i = 0; i < 4; ++i) {
      if (i > 0) out += ", ";
      out += "[" + fmt(s.vertices[i].x()) + ", " + fmt(s.vertices[i].y()) + ", " +
             fmt(s.vertices[i].z()) + "]";
    }
    out += "]\n";
    for (const auto& [name, n] : {std::pair{"node_a", s.node_a}, std::pair{"node_b", s.node_b}})
      out += std::string(name) + " = [" + fmt(n.x()) + ", " + fmt(n.y()) + ", " + fmt(n.z()) + "]\n";
  }
  return out;
}

double node_distance(const BridgeModel& m, const Point3& p, const Point3& q) {
  return (p - q).norm() * m.distance_scale;
}

RoutineKind routine_for_leg(const SurfacePolygon& s, const Point3& entry, const Point3& exit) {
  if (same_point(entry, exit))
    throw Error("degenerate leg on surface " + s.id + ": entry equals exit");
  switch (s.kind) {
    case SurfaceKind::column:
      return exit.z() > entry.z() ? RoutineKind::column_up : RoutineKind::column_down;
    case SurfaceKind::girder:
      return exit.x() > entry.x() ? RoutineKind::girder_right : RoutineKind::girder_left;
    case SurfaceKind::top:
      return exit.x() > entry.x() ? RoutineKind::top_right : RoutineKind::top_left;
    default:
      return exit.x() > entry.x() ? RoutineKind::bottom_right : RoutineKind::bottom_left;
  }
}

BridgeModel scaled_to_meters(const BridgeModel& m) {
  BridgeModel out = m;
  for (auto& s : out.surfaces) {
    for (auto& v : s.vertices) v *= m.distance_scale;
    s.node_a *= m.distance_scale;
    s.node_b *= m.distance_scale;
  }
  out.distance_scale = 1.0;
  return out;
}

}  // namespace girder
