#include "meshvf/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <tuple>

namespace meshvf {

namespace {

struct Context {
  const TriangleMesh& mesh;
  std::span<const ClosestPointResult> hits;
  const Vector3d& x;
  double coincidence;  // mm, closest points this close are the same point
  double min_direction;

  const ClosestPointResult* hit_for(TriangleId t) const {
    auto it = std::lower_bound(hits.begin(), hits.end(), t,
                               [](const ClosestPointResult& h, TriangleId id) { return h.triangle < id; });
    return (it != hits.end() && it->triangle == t) ? &*it : nullptr;
  }

  Convexity convexity(TriangleId t, int edge, TriangleId nb) const {
    const Triangle& tri = mesh.triangle(t);
    return edge_convexity(mesh, t, nb, {tri[edge], tri[(edge + 1) % 3]});
  }

  bool coincident(TriangleId nb, const Vector3d& cp) const {
    const ClosestPointResult* other = hit_for(nb);
    return other != nullptr && (other->point - cp).norm() <= coincidence;
  }
};

// Normal of the plane replacing a convex edge or vertex: x - cp, or the
// feature normal when the tool sits on the feature itself.
Vector3d feature_normal(const Context& ctx, const Vector3d& cp, const Vector3d& fallback) {
  const Vector3d d = ctx.x - cp;
  const double len = d.norm();
  if (len > ctx.min_direction) return d / len;
  return fallback;
}

// No concave or open edge around v: the solid is locally convex there, so any
// positive mix of the incident face normals separates it.
bool convex_vertex(const TriangleMesh& mesh, VertexId v) {
  for (TriangleId t : mesh.incident_triangles(v)) {
    const Triangle& tri = mesh.triangle(t);
    for (int e = 0; e < 3; ++e) {
      if (tri[e] != v && tri[(e + 1) % 3] != v) continue;
      const TriangleId nb = mesh.neighbor(t, e);
      if (nb == kNoTriangle) return false;
      if (edge_convexity(mesh, t, nb, {tri[e], tri[(e + 1) % 3]}) == Convexity::Concave) return false;
    }
  }
  return true;
}

std::optional<PlaneConstraint> evaluate(const Context& ctx, const ClosestPointResult& hit) {
  const TriangleMesh& mesh = ctx.mesh;
  const TriangleId t = hit.triangle;
  const Vector3d& n = mesh.face_normal(t);
  const bool positive = n.dot(ctx.x - hit.point) >= -kFeasibilitySlack;
  const auto face_plane = [&](ConstraintCondition c) { return PlaneConstraint{n, hit.point, t, c}; };

  switch (hit.region.kind) {
    case RegionKind::InTriangle:
      if (positive) return face_plane(ConstraintCondition::C1);
      return std::nullopt;

    case RegionKind::OnEdge: {
      const int e = hit.region.index;
      const TriangleId nb = mesh.neighbor(t, e);
      if (nb == kNoTriangle) {
        if (positive) return face_plane(ConstraintCondition::Boundary);
        return std::nullopt;
      }
      const Convexity conv = ctx.convexity(t, e, nb);
      if (conv == Convexity::Convex && ctx.coincident(nb, hit.point)) {
        const Vector3d bisector = (n + mesh.face_normal(nb)).normalized();
        return PlaneConstraint{feature_normal(ctx, hit.point, bisector), hit.point, t, ConstraintCondition::C2};
      }
      if (conv != Convexity::Convex && positive) return face_plane(ConstraintCondition::C3);
      return std::nullopt;
    }

    case RegionKind::OnVertex: {
      // The two local edges meeting at corner k are k and k + 2.
      const int k = hit.region.index;
      const VertexId v = mesh.triangle(t)[k];
      // Tool on a saddle or reflex vertex: the free space around it is not
      // convex, so keep every incident face plane. Their intersection is free.
      if ((ctx.x - hit.point).norm() <= ctx.min_direction && !convex_vertex(mesh, v))
        return face_plane(ConstraintCondition::C3);
      const int edges[2] = {k, (k + 2) % 3};
      bool concave = false;
      bool open = false;
      for (int e : edges) {
        const TriangleId nb = mesh.neighbor(t, e);
        if (nb == kNoTriangle) {
          open = true;
          continue;
        }
        const Convexity conv = ctx.convexity(t, e, nb);
        if (conv == Convexity::Convex && ctx.coincident(nb, hit.point)) {
          const Vector3d fallback = mesh.vertex_normal(v);
          return PlaneConstraint{feature_normal(ctx, hit.point, fallback), hit.point, t, ConstraintCondition::C2};
        }
        if (conv != Convexity::Convex) concave = true;
      }
      if (!positive) return std::nullopt;
      if (concave) return face_plane(ConstraintCondition::C3);
      if (open) return face_plane(ConstraintCondition::Boundary);
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::int64_t quantize(double v) { return static_cast<std::int64_t>(std::llround(v / kDedupResolution)); }

}  // namespace

std::string_view to_string(ConstraintCondition c) {
  switch (c) {
    case ConstraintCondition::C1:
      return "C1";
    case ConstraintCondition::C2:
      return "C2";
    case ConstraintCondition::C3:
      return "C3";
    case ConstraintCondition::Boundary:
      return "Boundary";
  }
  return "?";
}

ConstraintCondition condition_from_string(std::string_view s) {
  if (s == "C1") return ConstraintCondition::C1;
  if (s == "C2") return ConstraintCondition::C2;
  if (s == "C3") return ConstraintCondition::C3;
  if (s == "Boundary") return ConstraintCondition::Boundary;
  throw ParseError("unknown constraint condition '" + std::string(s) + "'");
}

ActiveConstraintSet generate_constraints(const TriangleMesh& mesh, const PDTree& tree, const Vector3d& x, double radius,
                                         std::int64_t tick) {
  if (!(radius > 0.0)) throw Error("motion sphere radius must be positive");
  const auto hits = query_sphere(tree, mesh, {x, radius});
  return generate_constraints(mesh, hits, x, tick);
}

ActiveConstraintSet generate_constraints(const TriangleMesh& mesh, std::span<const ClosestPointResult> hits,
                                         const Vector3d& x, std::int64_t tick) {
  const double scale = std::max(1.0, mesh.bbox_diagonal());
  const Context ctx{mesh, hits, x, 1e-9 * scale, 1e-9 * scale};

  ActiveConstraintSet out;
  out.tool_position = x;
  out.tick = tick;
  out.constraints.reserve(hits.size());

  using Key = std::array<std::int64_t, 6>;
  std::set<Key> seen;
  for (const ClosestPointResult& hit : hits) {
    auto c = evaluate(ctx, hit);
    if (!c) continue;
    const Key key{quantize(c->normal.x()), quantize(c->normal.y()), quantize(c->normal.z()),
                  quantize(c->point.x()),  quantize(c->point.y()),  quantize(c->point.z())};
    if (!seen.insert(key).second) continue;
    out.constraints.push_back(*c);
  }
  // Hits arrive in triangle order, so the output is already sorted by source.
  return out;
}

}  // namespace meshvf
