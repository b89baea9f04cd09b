#include "meshvf/oracle.hpp"

#include <cmath>
#include <limits>

namespace meshvf {

namespace {

// Irrational-looking directions so rays almost never graze an edge or vertex.
const Vector3d kRayDirections[3] = {
    Vector3d(0.5773502691896258, 0.6123724356957945, 0.5400617248673217).normalized(),
    Vector3d(-0.7071067811865476, 0.3916892170235363, 0.5883484054145521).normalized(),
    Vector3d(0.2360679774997897, -0.8660254037844386, -0.4409585518440984).normalized(),
};

// Moller-Trumbore; counts hits with t > 0.
bool ray_hits(const Vector3d& o, const Vector3d& d, const Vector3d& a, const Vector3d& b, const Vector3d& c) {
  const Vector3d e1 = b - a;
  const Vector3d e2 = c - a;
  const Vector3d p = d.cross(e2);
  const double det = e1.dot(p);
  if (std::abs(det) < 1e-300) return false;
  const double inv = 1.0 / det;
  const Vector3d s = o - a;
  const double u = s.dot(p) * inv;
  if (u < 0.0 || u > 1.0) return false;
  const Vector3d q = s.cross(e1);
  const double v = d.dot(q) * inv;
  if (v < 0.0 || u + v > 1.0) return false;
  return e2.dot(q) * inv > 0.0;
}

}  // namespace

DistanceOracle::DistanceOracle(const TriangleMesh& mesh) : mesh_(&mesh) {
  centers_.reserve(mesh.triangle_count());
  radii_.reserve(mesh.triangle_count());
  for (TriangleId t = 0; t < mesh.triangle_count(); ++t) {
    const Vector3d c = (mesh.corner(t, 0) + mesh.corner(t, 1) + mesh.corner(t, 2)) / 3.0;
    double r = 0.0;
    for (int k = 0; k < 3; ++k) r = std::max(r, (mesh.corner(t, k) - c).norm());
    centers_.push_back(c);
    radii_.push_back(r);
  }
}

ClosestPointResult DistanceOracle::closest(const Vector3d& x) const {
  ClosestPointResult best;
  best.distance = std::numeric_limits<double>::infinity();
  for (TriangleId t = 0; t < mesh_->triangle_count(); ++t) {
    if ((x - centers_[t]).norm() - radii_[t] > best.distance) continue;
    ClosestPointResult r = closest_point_on_triangle(x, mesh_->corner(t, 0), mesh_->corner(t, 1), mesh_->corner(t, 2));
    if (r.distance < best.distance) {
      r.triangle = t;
      best = r;
    }
  }
  return best;
}

int DistanceOracle::crossings(const Vector3d& origin, const Vector3d& dir) const {
  int count = 0;
  for (TriangleId t = 0; t < mesh_->triangle_count(); ++t)
    count += ray_hits(origin, dir, mesh_->corner(t, 0), mesh_->corner(t, 1), mesh_->corner(t, 2)) ? 1 : 0;
  return count;
}

bool DistanceOracle::inside(const Vector3d& x) const {
  if (!mesh_->is_closed()) throw OpenMeshSignUndefined("inside/outside is undefined for an open mesh");
  int votes = 0;
  for (const Vector3d& d : kRayDirections) votes += crossings(x, d) % 2;
  return votes >= 2;
}

double DistanceOracle::signed_distance(const Vector3d& x) const {
  const double d = unsigned_distance(x);
  if (d <= 1e-12 * std::max(1.0, mesh_->bbox_diagonal())) return d;
  return inside(x) ? -d : d;
}

double signed_distance_oracle(const TriangleMesh& mesh, const Vector3d& x) {
  return DistanceOracle(mesh).signed_distance(x);
}

}  // namespace meshvf
