#include "meshvf/triangle_geometry.hpp"

#include "meshvf/mesh.hpp"

namespace meshvf {

namespace {

bool has_vertex(const Triangle& t, VertexId v) { return t[0] == v || t[1] == v || t[2] == v; }

}  // namespace

Convexity edge_convexity(const TriangleMesh& mesh, TriangleId tri_a, TriangleId tri_b,
                         std::array<VertexId, 2> shared_edge) {
  if (tri_a >= mesh.triangle_count() || tri_b >= mesh.triangle_count() || tri_a == tri_b)
    throw NotAdjacentError("invalid triangle pair");
  const Triangle& a = mesh.triangle(tri_a);
  const Triangle& b = mesh.triangle(tri_b);
  const auto [u, v] = shared_edge;
  if (u == v || !has_vertex(a, u) || !has_vertex(a, v) || !has_vertex(b, u) || !has_vertex(b, v))
    throw NotAdjacentError("triangles " + std::to_string(tri_a) + " and " + std::to_string(tri_b) +
                           " do not share edge (" + std::to_string(u) + ", " + std::to_string(v) + ")");
  VertexId far = b[0];
  for (VertexId w : b)
    if (w != u && w != v) far = w;
  return edge_convexity<double>(mesh.face_normal(tri_a), mesh.vertex(u), mesh.vertex(far));
}

ClosestPointResult closest_point(const TriangleMesh& mesh, TriangleId t, const Vector3d& q) {
  ClosestPointResult r = closest_point_on_triangle<double>(q, mesh.corner(t, 0), mesh.corner(t, 1), mesh.corner(t, 2));
  r.triangle = t;
  return r;
}

const char* to_string(RegionKind kind) {
  switch (kind) {
    case RegionKind::InTriangle:
      return "InTriangle";
    case RegionKind::OnEdge:
      return "OnEdge";
    case RegionKind::OnVertex:
      return "OnVertex";
  }
  return "?";
}

const char* to_string(Convexity c) {
  switch (c) {
    case Convexity::Convex:
      return "Convex";
    case Convexity::Concave:
      return "Concave";
    case Convexity::Coplanar:
      return "Coplanar";
  }
  return "?";
}

}  // namespace meshvf
