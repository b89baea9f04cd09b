#include "meshvf/shapes.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <random>

namespace meshvf::shapes {

namespace {

constexpr double kPi = std::numbers::pi;

// Orients each face away from `center`; only valid for convex solids.
void orient_outward(const std::vector<Vector3d>& v, std::vector<Triangle>& tris, const Vector3d& center) {
  for (Triangle& t : tris) {
    const Vector3d n = (v[t[1]] - v[t[0]]).cross(v[t[2]] - v[t[0]]);
    const Vector3d c = (v[t[0]] + v[t[1]] + v[t[2]]) / 3.0;
    if (n.dot(c - center) < 0) std::swap(t[1], t[2]);
  }
}

struct IndexedMesh {
  std::vector<Vector3d> vertices;
  std::vector<Triangle> triangles;
};

IndexedMesh split_midpoints(const std::vector<Vector3d>& vertices, const std::vector<Triangle>& triangles) {
  IndexedMesh out{vertices, {}};
  std::map<std::pair<VertexId, VertexId>, VertexId> midpoint;
  const auto mid = [&](VertexId a, VertexId b) {
    const auto key = std::minmax(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const auto id = static_cast<VertexId>(out.vertices.size());
    out.vertices.push_back(0.5 * (out.vertices[a] + out.vertices[b]));
    midpoint.emplace(key, id);
    return id;
  };
  out.triangles.reserve(4 * triangles.size());
  for (const Triangle& t : triangles) {
    const VertexId ab = mid(t[0], t[1]);
    const VertexId bc = mid(t[1], t[2]);
    const VertexId ca = mid(t[2], t[0]);
    out.triangles.push_back({t[0], ab, ca});
    out.triangles.push_back({ab, t[1], bc});
    out.triangles.push_back({ca, bc, t[2]});
    out.triangles.push_back({ab, bc, ca});
  }
  return out;
}

IndexedMesh unit_icosphere(int levels) {
  const double p = (1.0 + std::sqrt(5.0)) / 2.0;
  IndexedMesh m;
  m.vertices = {{-1, p, 0}, {1, p, 0}, {-1, -p, 0}, {1, -p, 0}, {0, -1, p}, {0, 1, p},
                {0, -1, -p}, {0, 1, -p}, {p, 0, -1}, {p, 0, 1}, {-p, 0, -1}, {-p, 0, 1}};
  for (Vector3d& v : m.vertices) v.normalize();
  m.triangles = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                 {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                 {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  orient_outward(m.vertices, m.triangles, Vector3d::Zero());
  for (int l = 0; l < levels; ++l) {
    m = split_midpoints(m.vertices, m.triangles);
    for (Vector3d& v : m.vertices) v.normalize();
  }
  return m;
}

}  // namespace

TriangleMesh cube(double side, const Vector3d& center) {
  const double h = side / 2.0;
  std::vector<Vector3d> v;
  for (int i = 0; i < 8; ++i)
    v.push_back(center + Vector3d((i & 1) ? h : -h, (i & 2) ? h : -h, (i & 4) ? h : -h));
  // Quads as corner-index bit patterns, split along one diagonal.
  const int quads[6][4] = {{0, 1, 3, 2}, {4, 5, 7, 6}, {0, 1, 5, 4}, {2, 3, 7, 6}, {0, 2, 6, 4}, {1, 3, 7, 5}};
  std::vector<Triangle> t;
  for (const auto& q : quads) {
    t.push_back({VertexId(q[0]), VertexId(q[1]), VertexId(q[2])});
    t.push_back({VertexId(q[0]), VertexId(q[2]), VertexId(q[3])});
  }
  orient_outward(v, t, center);
  return TriangleMesh::from_indexed(std::move(v), std::move(t));
}

TriangleMesh icosphere(int levels, double radius) {
  IndexedMesh m = unit_icosphere(levels);
  for (Vector3d& v : m.vertices) v *= radius;
  return TriangleMesh::from_indexed(std::move(m.vertices), std::move(m.triangles));
}

TriangleMesh extrude(const std::vector<Eigen::Vector2d>& polygon, const Eigen::Vector2d& kernel, double height) {
  const auto n = static_cast<VertexId>(polygon.size());
  std::vector<Vector3d> v;
  for (const auto& p : polygon) v.emplace_back(p.x(), p.y(), 0.0);
  for (const auto& p : polygon) v.emplace_back(p.x(), p.y(), height);
  const VertexId bottom_center = 2 * n;
  const VertexId top_center = 2 * n + 1;
  v.emplace_back(kernel.x(), kernel.y(), 0.0);
  v.emplace_back(kernel.x(), kernel.y(), height);
  std::vector<Triangle> t;
  for (VertexId i = 0; i < n; ++i) {
    const VertexId j = (i + 1) % n;
    t.push_back({i, j, n + j});
    t.push_back({i, n + j, n + i});
    t.push_back({top_center, n + i, n + j});
    t.push_back({bottom_center, j, i});
  }
  return TriangleMesh::from_indexed(std::move(v), std::move(t));
}

TriangleMesh cylinder(int segments, double radius, double height) {
  std::vector<Eigen::Vector2d> poly;
  for (int i = 0; i < segments; ++i) {
    const double a = 2.0 * kPi * i / segments;
    poly.emplace_back(radius * std::cos(a), radius * std::sin(a));
  }
  return extrude(poly, Eigen::Vector2d::Zero(), height);
}

TriangleMesh torus(int major_segments, int minor_segments, double major_radius, double minor_radius) {
  std::vector<Vector3d> v;
  for (int i = 0; i < major_segments; ++i) {
    const double u = 2.0 * kPi * i / major_segments;
    for (int j = 0; j < minor_segments; ++j) {
      const double w = 2.0 * kPi * j / minor_segments;
      const double rho = major_radius + minor_radius * std::cos(w);
      v.emplace_back(rho * std::cos(u), rho * std::sin(u), minor_radius * std::sin(w));
    }
  }
  const auto id = [&](int i, int j) {
    return static_cast<VertexId>((i % major_segments) * minor_segments + (j % minor_segments));
  };
  std::vector<Triangle> t;
  for (int i = 0; i < major_segments; ++i) {
    for (int j = 0; j < minor_segments; ++j) {
      t.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      t.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return TriangleMesh::from_indexed(std::move(v), std::move(t));
}

TriangleMesh gear(int teeth, double root_radius, double tip_radius, double thickness) {
  std::vector<Eigen::Vector2d> poly;
  const double pitch = 2.0 * kPi / teeth;
  // Root arc, flank up, tip arc, flank down: four corners per tooth.
  const double fractions[4] = {0.0, 0.3, 0.5, 0.8};
  const double radii[4] = {root_radius, tip_radius, tip_radius, root_radius};
  for (int k = 0; k < teeth; ++k) {
    for (int c = 0; c < 4; ++c) {
      const double a = pitch * (k + fractions[c]);
      poly.emplace_back(radii[c] * std::cos(a), radii[c] * std::sin(a));
    }
  }
  return extrude(poly, Eigen::Vector2d::Zero(), thickness);
}

TriangleMesh l_block(double size, double height) {
  const double s = size;
  const double h = size / 2.0;
  std::vector<Eigen::Vector2d> poly = {{0, 0}, {s, 0}, {s, h}, {h, h}, {h, s}, {0, s}};
  return extrude(poly, Eigen::Vector2d(h / 2.0, h / 2.0), height);
}

TriangleMesh cross_prism(double arm, double width, double height) {
  const double a = arm + width / 2.0;
  const double w = width / 2.0;
  std::vector<Eigen::Vector2d> poly = {{w, -w}, {a, -w}, {a, w},   {w, w},   {w, a},   {-w, a},
                                       {-w, w}, {-a, w}, {-a, -w}, {-w, -w}, {-w, -a}, {w, -a}};
  return extrude(poly, Eigen::Vector2d::Zero(), height);
}

TriangleMesh blob(int levels, double radius, double amplitude, std::uint64_t seed) {
  IndexedMesh m = unit_icosphere(levels);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  std::uniform_int_distribution<int> freq(2, 4);
  struct Wave {
    Vector3d k;
    double phase;
  };
  std::vector<Wave> waves;
  for (int i = 0; i < 6; ++i) {
    Vector3d dir(phase(rng) - kPi, phase(rng) - kPi, phase(rng) - kPi);
    waves.push_back({dir.normalized() * freq(rng), phase(rng)});
  }
  for (Vector3d& v : m.vertices) {
    double bump = 0.0;
    for (const Wave& w : waves) bump += std::sin(w.k.dot(v) + w.phase);
    v *= radius * (1.0 + amplitude * bump / static_cast<double>(waves.size()) * 2.0);
  }
  return TriangleMesh::from_indexed(std::move(m.vertices), std::move(m.triangles));
}

TriangleMesh scan() { return blob(4, 40.0, 0.12, 11); }

TriangleMesh plane_sheet(double size, int n) {
  std::vector<Vector3d> v;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) v.emplace_back(size * (double(i) / n - 0.5), size * (double(j) / n - 0.5), 0.0);
  const auto id = [&](int i, int j) { return static_cast<VertexId>(j * (n + 1) + i); };
  std::vector<Triangle> t;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      t.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      t.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return TriangleMesh::from_indexed(std::move(v), std::move(t));
}

TriangleMesh subdivide(const TriangleMesh& mesh) {
  IndexedMesh m = split_midpoints(mesh.vertices(), mesh.triangles());
  return TriangleMesh::from_indexed(std::move(m.vertices), std::move(m.triangles));
}

std::vector<std::string> names() {
  return {"cube", "icosphere", "cylinder", "torus", "gear", "lblock", "cross", "blob", "scan"};
}

TriangleMesh make(const std::string& name) {
  if (name == "cube") return cube();
  if (name == "icosphere") return icosphere();
  if (name == "cylinder") return cylinder();
  if (name == "torus") return torus();
  if (name == "gear") return gear();
  if (name == "lblock") return l_block();
  if (name == "cross") return cross_prism();
  if (name == "blob") return blob();
  if (name == "scan") return scan();
  throw Error("unknown shape '" + name + "'");
}

}  // namespace meshvf::shapes
