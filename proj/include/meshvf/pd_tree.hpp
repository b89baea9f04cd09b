#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "meshvf/mesh.hpp"
#include "meshvf/triangle_geometry.hpp"

namespace meshvf {

/// Ball around the tool tip bounding one control tick of motion.
struct MotionSphere {
  Vector3d center = Vector3d::Zero();
  double radius = 0.0;
};

/// Principal-direction tree over the triangles of a mesh.
///
/// Every node carries its own orthonormal frame whose first axis is the
/// dominant principal direction of the contained triangle centroids, and a
/// box in that frame enclosing all contained triangle corners. Leaves keep a
/// packed copy of their triangles' corners so the leaf scan touches
/// contiguous memory.
class PDTree {
 public:
  static constexpr std::size_t kDefaultLeafCapacity = 8;

  struct Node {
    Matrix3d frame = Matrix3d::Identity();  // rows: node axes, world -> local
    Vector3d lower = Vector3d::Zero();
    Vector3d upper = Vector3d::Zero();
    std::uint32_t left = 0;  // 0 marks a leaf; the root is never a child
    std::uint32_t right = 0;
    std::uint32_t begin = 0;  // range into triangle_order()
    std::uint32_t end = 0;

    bool is_leaf() const { return left == 0; }
  };

  PDTree() = default;

  static PDTree build(const TriangleMesh& mesh, std::size_t leaf_capacity = kDefaultLeafCapacity);

  /// All triangles whose closest point to the sphere centre lies within the
  /// radius, sorted by triangle id.
  std::vector<ClosestPointResult> query(const MotionSphere& sphere) const;

  /// Same as query() but reuses `out` (cleared first).
  void query(const MotionSphere& sphere, std::vector<ClosestPointResult>& out) const;

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<TriangleId>& triangle_order() const { return order_; }
  std::size_t leaf_capacity() const { return leaf_capacity_; }
  std::size_t triangle_count() const { return order_.size(); }

  /// Number of nodes visited by the most recent query on this thread.
  static std::size_t last_visited_nodes();

 private:
  std::vector<Node> nodes_;
  std::vector<TriangleId> order_;
  std::vector<Vector3d> packed_;  // 3 corners per entry of order_
  std::size_t leaf_capacity_ = kDefaultLeafCapacity;
};

PDTree build_pdtree(const TriangleMesh& mesh, std::size_t leaf_capacity = PDTree::kDefaultLeafCapacity);

/// Motion-sphere query. `mesh` must be the mesh the tree was built from.
std::vector<ClosestPointResult> query_sphere(const PDTree& tree, const TriangleMesh& mesh, const MotionSphere& sphere);

/// Principal frame of a point set: rows ordered by decreasing variance, each
/// row's largest-magnitude component made positive, third row = first x second.
Matrix3d principal_frame(const std::vector<Vector3d>& points);

}  // namespace meshvf
