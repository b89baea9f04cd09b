#include "meshvf/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace meshvf {

namespace {

struct EdgeEntry {
  VertexId lo;
  VertexId hi;
  TriangleId tri;
  std::uint8_t local;
  bool forward;  // traversed lo -> hi

  bool same_edge(const EdgeEntry& o) const { return lo == o.lo && hi == o.hi; }
};

std::vector<EdgeEntry> sorted_edges(std::span<const Triangle> triangles) {
  std::vector<EdgeEntry> edges;
  edges.reserve(3 * triangles.size());
  for (TriangleId t = 0; t < triangles.size(); ++t) {
    for (int e = 0; e < 3; ++e) {
      VertexId a = triangles[t][e];
      VertexId b = triangles[t][(e + 1) % 3];
      edges.push_back({std::min(a, b), std::max(a, b), t, static_cast<std::uint8_t>(e), a < b});
    }
  }
  std::sort(edges.begin(), edges.end(), [](const EdgeEntry& x, const EdgeEntry& y) {
    return std::tie(x.lo, x.hi, x.tri, x.local) < std::tie(y.lo, y.hi, y.tri, y.local);
  });
  return edges;
}

double triangle_area(const Vector3d& a, const Vector3d& b, const Vector3d& c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

}  // namespace

TriangleMesh TriangleMesh::from_indexed(std::vector<Vector3d> vertices, std::vector<Triangle> triangles) {
  TriangleMesh mesh;
  std::vector<Triangle> kept;
  kept.reserve(triangles.size());
  for (const Triangle& t : triangles) {
    for (VertexId v : t) {
      if (v >= vertices.size()) throw ParseError("triangle references vertex " + std::to_string(v) + " out of range");
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2] ||
        triangle_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]) < kDegenerateArea) {
      ++mesh.dropped_degenerate_;
      continue;
    }
    kept.push_back(t);
  }
  if (kept.empty()) throw DegenerateMeshError("mesh has no non-degenerate triangles");

  // Compact to referenced vertices, preserving order.
  std::vector<VertexId> remap(vertices.size(), static_cast<VertexId>(-1));
  for (const Triangle& t : kept)
    for (VertexId v : t) remap[v] = 0;
  VertexId next = 0;
  for (std::size_t v = 0; v < vertices.size(); ++v) {
    if (remap[v] == 0) {
      remap[v] = next;
      if (next != v) vertices[next] = vertices[v];
      ++next;
    }
  }
  vertices.resize(next);
  for (Triangle& t : kept)
    for (VertexId& v : t) v = remap[v];

  mesh.vertices_ = std::move(vertices);
  mesh.triangles_ = std::move(kept);
  mesh.build();
  return mesh;
}

TriangleMesh TriangleMesh::from_soup(std::span<const Vector3d> corners) {
  if (corners.size() % 3 != 0) throw ParseError("triangle soup size is not a multiple of 3");
  Eigen::AlignedBox3d box;
  for (const Vector3d& p : corners) box.extend(p);
  const double diag = box.isEmpty() ? 0.0 : box.diagonal().norm();
  const double tol = kWeldRelativeTolerance * diag;

  std::vector<Vector3d> vertices;
  std::vector<VertexId> index(corners.size());
  if (tol <= 0.0) {
    // All corners coincide; every face is degenerate.
    vertices.assign(corners.begin(), corners.end());
    std::iota(index.begin(), index.end(), 0);
  } else {
    struct KeyHash {
      std::size_t operator()(const std::array<std::int64_t, 3>& k) const {
        std::size_t h = static_cast<std::size_t>(k[0]) * 73856093u;
        h ^= static_cast<std::size_t>(k[1]) * 19349663u;
        h ^= static_cast<std::size_t>(k[2]) * 83492791u;
        return h;
      }
    };
    std::unordered_map<std::array<std::int64_t, 3>, std::vector<VertexId>, KeyHash> grid;
    grid.reserve(corners.size());
    const double tol2 = tol * tol;
    for (std::size_t i = 0; i < corners.size(); ++i) {
      const Vector3d& p = corners[i];
      std::array<std::int64_t, 3> cell{};
      for (int k = 0; k < 3; ++k) cell[k] = static_cast<std::int64_t>(std::floor((p[k] - box.min()[k]) / tol));
      VertexId found = static_cast<VertexId>(-1);
      for (int dx = -1; dx <= 1 && found == static_cast<VertexId>(-1); ++dx)
        for (int dy = -1; dy <= 1 && found == static_cast<VertexId>(-1); ++dy)
          for (int dz = -1; dz <= 1 && found == static_cast<VertexId>(-1); ++dz) {
            auto it = grid.find({cell[0] + dx, cell[1] + dy, cell[2] + dz});
            if (it == grid.end()) continue;
            for (VertexId v : it->second) {
              if ((vertices[v] - p).squaredNorm() <= tol2) {
                found = v;
                break;
              }
            }
          }
      if (found == static_cast<VertexId>(-1)) {
        found = static_cast<VertexId>(vertices.size());
        vertices.push_back(p);
        grid[cell].push_back(found);
      }
      index[i] = found;
    }
  }

  std::vector<Triangle> triangles(corners.size() / 3);
  for (std::size_t t = 0; t < triangles.size(); ++t) triangles[t] = {index[3 * t], index[3 * t + 1], index[3 * t + 2]};
  return from_indexed(std::move(vertices), std::move(triangles));
}

void TriangleMesh::build() {
  const std::size_t nt = triangles_.size();
  normals_.resize(nt);
  for (TriangleId t = 0; t < nt; ++t) {
    const Vector3d& a = corner(t, 0);
    normals_[t] = (corner(t, 1) - a).cross(corner(t, 2) - a).normalized();
  }

  bounds_.setEmpty();
  for (const Vector3d& p : vertices_) bounds_.extend(p);

  neighbors_.assign(3 * nt, kNoTriangle);
  const auto edges = sorted_edges(triangles_);
  edge_count_ = 0;
  boundary_edges_ = 0;
  for (std::size_t i = 0; i < edges.size();) {
    std::size_t j = i + 1;
    while (j < edges.size() && edges[j].same_edge(edges[i])) ++j;
    const std::size_t incident = j - i;
    if (incident > 2) throw NonManifoldError(edges[i].lo, edges[i].hi, incident);
    ++edge_count_;
    if (incident == 1) {
      ++boundary_edges_;
    } else {
      neighbors_[3 * edges[i].tri + edges[i].local] = edges[i + 1].tri;
      neighbors_[3 * edges[i + 1].tri + edges[i + 1].local] = edges[i].tri;
    }
    i = j;
  }

  incidence_offsets_.assign(vertices_.size() + 1, 0);
  for (const Triangle& t : triangles_)
    for (VertexId v : t) ++incidence_offsets_[v + 1];
  std::partial_sum(incidence_offsets_.begin(), incidence_offsets_.end(), incidence_offsets_.begin());
  incidence_.resize(3 * nt);
  std::vector<std::size_t> fill(incidence_offsets_.begin(), incidence_offsets_.end() - 1);
  for (TriangleId t = 0; t < nt; ++t)
    for (VertexId v : triangles_[t]) incidence_[fill[v]++] = t;
}

int TriangleMesh::neighbor_edge(TriangleId t, int edge) const {
  const TriangleId n = neighbor(t, edge);
  if (n == kNoTriangle) return -1;
  const VertexId a = triangles_[t][edge];
  const VertexId b = triangles_[t][(edge + 1) % 3];
  for (int e = 0; e < 3; ++e) {
    const VertexId c = triangles_[n][e];
    const VertexId d = triangles_[n][(e + 1) % 3];
    if ((c == a && d == b) || (c == b && d == a)) return e;
  }
  return -1;
}

Vector3d TriangleMesh::vertex_normal(VertexId v) const {
  Vector3d sum = Vector3d::Zero();
  for (TriangleId t : incident_triangles(v)) {
    const Triangle& tri = triangles_[t];
    const int k = tri[0] == v ? 0 : (tri[1] == v ? 1 : 2);
    const Vector3d e1 = (corner(t, (k + 1) % 3) - corner(t, k)).normalized();
    const Vector3d e2 = (corner(t, (k + 2) % 3) - corner(t, k)).normalized();
    const double angle = std::acos(std::clamp(e1.dot(e2), -1.0, 1.0));
    sum += angle * normals_[t];
  }
  return sum.normalized();
}

std::vector<TriangleId> adjacent_triangles(const TriangleMesh& mesh, TriangleId tri, int edge) {
  const TriangleId n = mesh.neighbor(tri, edge);
  if (n == kNoTriangle) return {};
  return {n};
}

ValidationReport validate(const TriangleMesh& mesh) { return validate(mesh.triangles()); }

ValidationReport validate(std::span<const Triangle> triangles) {
  ValidationReport report;
  const auto edges = sorted_edges(triangles);
  for (std::size_t i = 0; i < edges.size();) {
    std::size_t j = i + 1;
    while (j < edges.size() && edges[j].same_edge(edges[i])) ++j;
    const std::size_t incident = j - i;
    if (incident == 1) {
      ++report.boundary;
    } else if (incident == 2) {
      if (edges[i].forward == edges[i + 1].forward) ++report.flipped;
    } else {
      ++report.non_manifold;
    }
    i = j;
  }
  return report;
}

}  // namespace meshvf
