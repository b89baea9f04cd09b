#pragma once

#include <vector>

#include "meshvf/mesh.hpp"
#include "meshvf/triangle_geometry.hpp"

namespace meshvf {

class OpenMeshSignUndefined : public Error {
 public:
  using Error::Error;
};

/// Independent inside/outside verifier: closest point by a scan over every
/// triangle, sign by majority vote of three ray-crossing parity tests.
///
/// Shares nothing with the PD-tree. Per-triangle bounding spheres only skip
/// triangles that provably cannot beat the current best distance.
class DistanceOracle {
 public:
  explicit DistanceOracle(const TriangleMesh& mesh);
  explicit DistanceOracle(TriangleMesh&&) = delete;  // keeps a pointer to the mesh

  const TriangleMesh& mesh() const { return *mesh_; }

  /// Closest point over all triangles.
  ClosestPointResult closest(const Vector3d& x) const;

  double unsigned_distance(const Vector3d& x) const { return closest(x).distance; }

  /// Ray-parity majority over three fixed directions. Throws OpenMeshSignUndefined
  /// for meshes with boundary edges.
  bool inside(const Vector3d& x) const;

  /// Positive outside, negative inside. Points within 1e-12 x diagonal of the
  /// surface report the unsigned distance.
  double signed_distance(const Vector3d& x) const;

 private:
  int crossings(const Vector3d& origin, const Vector3d& dir) const;

  const TriangleMesh* mesh_;
  std::vector<Vector3d> centers_;
  std::vector<double> radii_;
};

/// One-shot convenience over DistanceOracle.
double signed_distance_oracle(const TriangleMesh& mesh, const Vector3d& x);

}  // namespace meshvf
