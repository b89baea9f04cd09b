#include "meshvf/mesh_series.hpp"

#include <algorithm>
#include <queue>

#include "meshvf/shapes.hpp"

namespace meshvf {

namespace {

// Minimum cosine between a face normal before and after a collapse.
constexpr double kMinNormalCosine = 0.2;

struct Candidate {
  double length2;
  VertexId a;
  VertexId b;
  std::uint32_t stamp_a;
  std::uint32_t stamp_b;

  bool operator>(const Candidate& o) const {
    if (length2 != o.length2) return length2 > o.length2;
    if (a != o.a) return a > o.a;
    return b > o.b;
  }
};

class Collapser {
 public:
  explicit Collapser(const TriangleMesh& mesh)
      : pos_(mesh.vertices()),
        tris_(mesh.triangles()),
        tri_alive_(tris_.size(), 1),
        vert_alive_(pos_.size(), 1),
        stamp_(pos_.size(), 0),
        incident_(pos_.size()),
        alive_(tris_.size()) {
    for (TriangleId t = 0; t < tris_.size(); ++t)
      for (VertexId v : tris_[t]) incident_[v].push_back(t);
    for (const Triangle& t : tris_)
      for (int k = 0; k < 3; ++k)
        if (t[k] < t[(k + 1) % 3]) push(t[k], t[(k + 1) % 3]);
  }

  void run(std::size_t target) {
    while (alive_ > target) {
      if (alive_ < 8 || heap_.empty()) throw DecimationFailure("no legal edge collapse left above the target count");
      const Candidate c = heap_.top();
      heap_.pop();
      if (!vert_alive_[c.a] || !vert_alive_[c.b] || stamp_[c.a] != c.stamp_a || stamp_[c.b] != c.stamp_b) continue;
      collapse(c.a, c.b);
    }
  }

  TriangleMesh result() const {
    std::vector<Triangle> out;
    out.reserve(alive_);
    for (TriangleId t = 0; t < tris_.size(); ++t)
      if (tri_alive_[t]) out.push_back(tris_[t]);
    return TriangleMesh::from_indexed(pos_, std::move(out));
  }

 private:
  void push(VertexId a, VertexId b) {
    heap_.push({(pos_[a] - pos_[b]).squaredNorm(), a, b, stamp_[a], stamp_[b]});
  }

  std::vector<VertexId> ring(VertexId v) const {
    std::vector<VertexId> out;
    for (TriangleId t : incident_[v])
      for (VertexId w : tris_[t])
        if (w != v) out.push_back(w);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  static bool contains(const Triangle& t, VertexId v) { return t[0] == v || t[1] == v || t[2] == v; }

  bool collapse(VertexId a, VertexId b) {
    std::vector<TriangleId> shared;
    for (TriangleId t : incident_[a])
      if (contains(tris_[t], b)) shared.push_back(t);
    if (shared.size() != 2) return false;

    // Link condition: the endpoints' rings may only share the two opposite vertices.
    const auto ra = ring(a);
    const auto rb = ring(b);
    std::vector<VertexId> common;
    std::set_intersection(ra.begin(), ra.end(), rb.begin(), rb.end(), std::back_inserter(common));
    if (common.size() != 2) return false;

    const Vector3d mid = 0.5 * (pos_[a] + pos_[b]);
    for (VertexId v : {a, b}) {
      for (TriangleId t : incident_[v]) {
        if (t == shared[0] || t == shared[1]) continue;
        Triangle tri = tris_[t];
        const Vector3d before = (pos_[tri[1]] - pos_[tri[0]]).cross(pos_[tri[2]] - pos_[tri[0]]);
        std::array<Vector3d, 3> p{pos_[tri[0]], pos_[tri[1]], pos_[tri[2]]};
        for (int k = 0; k < 3; ++k)
          if (tri[k] == v) p[k] = mid;
        const Vector3d after = (p[1] - p[0]).cross(p[2] - p[0]);
        if (0.5 * after.norm() < 10.0 * kDegenerateArea) return false;
        if (before.normalized().dot(after.normalized()) < kMinNormalCosine) return false;
      }
    }

    pos_[a] = mid;
    vert_alive_[b] = 0;
    for (TriangleId t : shared) tri_alive_[t] = 0;
    alive_ -= 2;
    for (TriangleId t : incident_[b]) {
      if (!tri_alive_[t]) continue;
      for (VertexId& w : tris_[t])
        if (w == b) w = a;
      incident_[a].push_back(t);
    }
    incident_[b].clear();
    auto& ia = incident_[a];
    ia.erase(std::remove_if(ia.begin(), ia.end(), [&](TriangleId t) { return !tri_alive_[t]; }), ia.end());
    for (VertexId w : common)
      std::erase_if(incident_[w], [&](TriangleId t) { return !tri_alive_[t]; });

    ++stamp_[a];
    for (VertexId w : ring(a)) push(std::min(a, w), std::max(a, w));
    return true;
  }

  std::vector<Vector3d> pos_;
  std::vector<Triangle> tris_;
  std::vector<char> tri_alive_;
  std::vector<char> vert_alive_;
  std::vector<std::uint32_t> stamp_;
  std::vector<std::vector<TriangleId>> incident_;
  std::size_t alive_;
  std::priority_queue<Candidate, std::vector<Candidate>, std::greater<>> heap_;
};

}  // namespace

TriangleMesh decimate(const TriangleMesh& mesh, std::size_t target_triangles) {
  if (!mesh.is_closed()) throw DecimationFailure("decimation needs a closed mesh");
  if (target_triangles >= mesh.triangle_count()) return mesh;
  Collapser c(mesh);
  c.run(target_triangles);
  return c.result();
}

std::vector<TriangleMesh> generate_mesh_series(const TriangleMesh& base, std::size_t levels, SeriesMode mode) {
  std::vector<TriangleMesh> out;
  if (levels == 0) return out;
  out.push_back(base);
  while (out.size() < levels) {
    const TriangleMesh& prev = out.back();
    out.push_back(mode == SeriesMode::Subdivide ? shapes::subdivide(prev) : decimate(prev, prev.triangle_count() / 2));
  }
  return out;
}

}  // namespace meshvf
