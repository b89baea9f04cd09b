#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "meshvf/mesh.hpp"
#include "meshvf/pd_tree.hpp"

namespace meshvf {

/// Side tests accept a tool this far (mm) inside a face plane.
inline constexpr double kFeasibilitySlack = 1e-7;

/// Quantisation step for constraint deduplication.
inline constexpr double kDedupResolution = 1e-9;

enum class ConstraintCondition {
  C1,       // closest point inside the face, tool on the positive side
  C2,       // closest point shared with a convex neighbour: plane normal x - cp
  C3,       // closest point on a concave (or coplanar) edge, tool on the positive side
  Boundary  // closest point on an open edge, tool on the positive side
};

std::string_view to_string(ConstraintCondition c);
ConstraintCondition condition_from_string(std::string_view s);

/// Half-space {y : normal . (y - point) >= 0}.
struct PlaneConstraint {
  Vector3d normal = Vector3d::UnitZ();
  Vector3d point = Vector3d::Zero();
  TriangleId source = kNoTriangle;
  ConstraintCondition condition = ConstraintCondition::C1;

  double signed_distance(const Vector3d& x) const { return normal.dot(x - point); }
};

struct ActiveConstraintSet {
  std::vector<PlaneConstraint> constraints;  // sorted by source triangle
  Vector3d tool_position = Vector3d::Zero();
  std::int64_t tick = 0;
};

/// Activation rules over the triangles inside the motion sphere at `x`.
ActiveConstraintSet generate_constraints(const TriangleMesh& mesh, const PDTree& tree, const Vector3d& x, double radius,
                                         std::int64_t tick = 0);

/// Same, from an existing motion-sphere query result (sorted by triangle id).
ActiveConstraintSet generate_constraints(const TriangleMesh& mesh, std::span<const ClosestPointResult> hits,
                                         const Vector3d& x, std::int64_t tick = 0);

}  // namespace meshvf
