#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "meshvf/types.hpp"

namespace meshvf {

class TriangleMesh;

/// Barycentric tolerance separating in-triangle, on-edge and on-vertex points.
inline constexpr double kRegionTolerance = 1e-9;

/// Signed-height tolerance (mm) below which a neighbouring face is coplanar.
inline constexpr double kConvexityTolerance = 1e-9;

enum class RegionKind { InTriangle, OnEdge, OnVertex };

/// Where a closest point landed. `index` is the local edge (OnEdge) or local
/// vertex (OnVertex); unused for InTriangle.
struct Region {
  RegionKind kind = RegionKind::InTriangle;
  int index = -1;

  static Region in_triangle() { return {RegionKind::InTriangle, -1}; }
  static Region on_edge(int e) { return {RegionKind::OnEdge, e}; }
  static Region on_vertex(int v) { return {RegionKind::OnVertex, v}; }

  bool operator==(const Region&) const = default;
};

template <typename Scalar>
struct ClosestPoint {
  TriangleId triangle = kNoTriangle;
  Vector3<Scalar> point = Vector3<Scalar>::Zero();
  Vector3<Scalar> barycentric = Vector3<Scalar>::Zero();
  Region region;
  Scalar distance = 0;
};

using ClosestPointResult = ClosestPoint<double>;

/// Classifies barycentric coordinates: all above tol is interior, exactly one at
/// or below tol is the opposite edge, two is the remaining vertex.
template <typename Scalar>
Region classify_barycentric(const Vector3<Scalar>& bary, Scalar tol = Scalar(kRegionTolerance)) {
  const bool small[3] = {bary[0] <= tol, bary[1] <= tol, bary[2] <= tol};
  const int count = int(small[0]) + int(small[1]) + int(small[2]);
  if (count == 0) return Region::in_triangle();
  if (count == 1) {
    const int k = small[0] ? 0 : (small[1] ? 1 : 2);
    return Region::on_edge((k + 1) % 3);  // edge opposite corner k
  }
  const int k = !small[0] ? 0 : (!small[1] ? 1 : 2);
  return Region::on_vertex(k);
}

/// Closest point on the closed triangle (a, b, c) to `q`, with Voronoi-region
/// case analysis in the style of Ericson's "Real-Time Collision Detection".
/// Throws DegenerateTriangleError when the triangle area is below kDegenerateArea.
template <typename Scalar>
ClosestPoint<Scalar> closest_point_on_triangle(const Vector3<Scalar>& q, const Vector3<Scalar>& a,
                                               const Vector3<Scalar>& b, const Vector3<Scalar>& c) {
  const Vector3<Scalar> ab = b - a;
  const Vector3<Scalar> ac = c - a;
  if (ab.cross(ac).squaredNorm() < Scalar(4e-24)) throw DegenerateTriangleError("triangle area below threshold");

  Vector3<Scalar> bary;
  const Vector3<Scalar> ap = q - a;
  const Scalar d1 = ab.dot(ap);
  const Scalar d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) {
    bary << 1, 0, 0;
  } else {
    const Vector3<Scalar> bp = q - b;
    const Scalar d3 = ab.dot(bp);
    const Scalar d4 = ac.dot(bp);
    const Vector3<Scalar> cp = q - c;
    const Scalar d5 = ab.dot(cp);
    const Scalar d6 = ac.dot(cp);
    const Scalar vc = d1 * d4 - d3 * d2;
    const Scalar vb = d5 * d2 - d1 * d6;
    const Scalar va = d3 * d6 - d5 * d4;
    if (d3 >= 0 && d4 <= d3) {
      bary << 0, 1, 0;
    } else if (vc <= 0 && d1 >= 0 && d3 <= 0) {
      const Scalar v = d1 / (d1 - d3);
      bary << 1 - v, v, 0;
    } else if (d6 >= 0 && d5 <= d6) {
      bary << 0, 0, 1;
    } else if (vb <= 0 && d2 >= 0 && d6 <= 0) {
      const Scalar w = d2 / (d2 - d6);
      bary << 1 - w, 0, w;
    } else if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) {
      const Scalar w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
      bary << 0, 1 - w, w;
    } else {
      const Scalar denom = Scalar(1) / (va + vb + vc);
      const Scalar v = vb * denom;
      const Scalar w = vc * denom;
      bary << 1 - v - w, v, w;
    }
  }

  ClosestPoint<Scalar> out;
  out.barycentric = bary;
  out.region = classify_barycentric<Scalar>(bary);
  // Snap onto the feature so edge and vertex points are exactly shared with neighbours.
  switch (out.region.kind) {
    case RegionKind::OnVertex: {
      const Vector3<Scalar>* corners[3] = {&a, &b, &c};
      out.point = *corners[out.region.index];
      out.barycentric.setZero();
      out.barycentric[out.region.index] = 1;
      break;
    }
    case RegionKind::OnEdge: {
      const Vector3<Scalar>* corners[3] = {&a, &b, &c};
      const int i = out.region.index;
      const int j = (i + 1) % 3;
      const int k = (i + 2) % 3;
      // Re-project onto the segment with endpoints in lexicographic order so
      // both faces sharing the edge produce bit-identical points.
      int lo = i;
      int hi = j;
      if (std::lexicographical_compare(corners[j]->data(), corners[j]->data() + 3, corners[i]->data(),
                                       corners[i]->data() + 3))
        std::swap(lo, hi);
      const Vector3<Scalar>& p0 = *corners[lo];
      const Vector3<Scalar> d = *corners[hi] - p0;
      const Scalar t = std::clamp(d.dot(q - p0) / d.squaredNorm(), Scalar(0), Scalar(1));
      out.point = p0 + t * d;
      out.barycentric[lo] = 1 - t;
      out.barycentric[hi] = t;
      out.barycentric[k] = 0;
      break;
    }
    case RegionKind::InTriangle:
      out.point = bary[0] * a + bary[1] * b + bary[2] * c;
      break;
  }
  out.distance = (q - out.point).norm();
  return out;
}

enum class Convexity { Convex, Concave, Coplanar };

/// Convexity of the edge shared by a face with unit normal `normal_a` and a
/// neighbour whose non-shared vertex is `far_vertex_b`. `edge_point` is any point
/// on the shared edge. The far vertex strictly below face A's plane is a convex
/// ridge, strictly above is a concave valley.
template <typename Scalar>
Convexity edge_convexity(const Vector3<Scalar>& normal_a, const Vector3<Scalar>& edge_point,
                         const Vector3<Scalar>& far_vertex_b, Scalar tol = Scalar(kConvexityTolerance)) {
  const Scalar h = normal_a.dot(far_vertex_b - edge_point);
  if (h < -tol) return Convexity::Convex;
  if (h > tol) return Convexity::Concave;
  return Convexity::Coplanar;
}

/// Convexity of the edge `shared_edge` (vertex ids, either order) between
/// `tri_a` and `tri_b`. Throws NotAdjacentError if they do not share it.
Convexity edge_convexity(const TriangleMesh& mesh, TriangleId tri_a, TriangleId tri_b,
                         std::array<VertexId, 2> shared_edge);

/// Closest point on triangle `t` of `mesh`, tagged with its id.
ClosestPointResult closest_point(const TriangleMesh& mesh, TriangleId t, const Vector3d& q);

const char* to_string(RegionKind kind);
const char* to_string(Convexity c);

}  // namespace meshvf
